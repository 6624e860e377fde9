public class Main {
  public static void main(String[] args) {
    int size = 6;
    long[][] ways = new long[size][size];
    for (int r = 0; r < size; r++) {
      ways[r][0] = 1;
    }
    for (int c = 0; c < size; c++) {
      ways[0][c] = 1;
    }
    for (int r = 1; r < size; r++) {
      for (int c = 1; c < size; c++) {
        ways[r][c] = ways[r - 1][c] + ways[r][c - 1];
      }
    }
    System.out.println(ways[size - 1][size - 1]);
  }
}
