public class Main {
  public static void main(String[] args) {
    int[] arr = {5, 2, 9, 1, 5, 6};
    int n = arr.length;
    boolean swapped = true;
    while (swapped) {
      swapped = false;
      for (int i = 1; i < n; i++) {
        if (arr[i - 1] > arr[i]) {
          int tmp = arr[i - 1];
          arr[i - 1] = arr[i];
          arr[i] = tmp;
          swapped = true;
        }
      }
    }
    StringBuilder sb = new StringBuilder();
    for (int v : arr) {
      sb.append(v).append(' ');
    }
    System.out.println(sb.toString().trim());
  }
}
