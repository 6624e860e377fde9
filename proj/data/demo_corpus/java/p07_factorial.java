public class Main {
  static long factorial(int n) {
    long acc = 1;
    for (int k = 2; k <= n; k++) {
      acc *= k;
    }
    return acc;
  }

  public static void main(String[] args) {
    int upper_bound = 10;
    long total = 0;
    int i = 1;
    while (i <= upper_bound) {
      total += factorial(i);
      i++;
    }
    System.out.println(total);
  }
}
