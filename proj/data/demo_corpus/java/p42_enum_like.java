public class Main {
  static final int RED = 0;
  static final int GREEN = 1;

  static int next(int color) {
    int following;
    if (color == RED) {
      following = GREEN;
    } else {
      following = RED;
    }
    return following;
  }

  public static void main(String[] args) {
    int c = RED;
    for (int i = 0; i < 3; i++) {
      c = next(c);
    }
    System.out.println(c);
  }
}
