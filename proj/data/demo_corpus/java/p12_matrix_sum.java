public class Main {
  public static void main(String[] args) {
    int rows = 3;
    int cols = 4;
    int[][] grid = new int[rows][cols];
    for (int r = 0; r < rows; r++) {
      for (int c = 0; c < cols; c++) {
        grid[r][c] = r * cols + c;
      }
    }
    int total_sum = 0;
    for (int[] row : grid) {
      for (int cell : row) {
        total_sum += cell;
      }
    }
    System.out.println(total_sum);
  }
}
