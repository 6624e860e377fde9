public class Main {
  public static void main(String[] args) {
    long start_value = 27;
    long n = start_value;
    int steps = 0;
    while (n != 1) {
      if (n % 2 == 0) {
        n = n / 2;
      } else {
        n = 3 * n + 1;
      }
      steps++;
    }
    System.out.println(steps);
  }
}
