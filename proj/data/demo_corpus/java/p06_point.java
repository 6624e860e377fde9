public class Main {
  static class Point {
    private final int x;
    private final int y;

    Point(int x, int y) {
      this.x = x;
      this.y = y;
    }

    int manhattan(Point other) {
      int dx = Math.abs(x - other.x);
      int dy = Math.abs(y - other.y);
      return dx + dy;
    }
  }

  public static void main(String[] args) {
    Point origin = new Point(0, 0);
    Point target = new Point(3, 4);
    System.out.println(origin.manhattan(target));
  }
}
