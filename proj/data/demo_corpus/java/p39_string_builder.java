public class Main {
  public static void main(String[] args) {
    int width = 5;
    int height = 3;
    StringBuilder canvas = new StringBuilder();
    int row = 0;
    while (row < height) {
      for (int col = 0; col < width; col++) {
        canvas.append((row + col) % 2 == 0 ? '#' : '.');
      }
      canvas.append('\n');
      row++;
    }
    System.out.print(canvas);
  }
}
