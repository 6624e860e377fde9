public class Main {
  public static void main(String[] args) {
    int[] values = {7, -3, 12, 0, 5};
    int low = values[0];
    int high = values[0];
    for (int k = 1; k < values.length; k++) {
      low = Math.min(low, values[k]);
      high = Math.max(high, values[k]);
    }
    int span = high - low;
    System.out.println(low + " " + high + " " + span);
  }
}
