public class Main {
  static int digitSum(long n) {
    int sum = 0;
    while (n > 0) {
      sum += (int) (n % 10);
      n /= 10;
    }
    return sum;
  }

  public static void main(String[] args) {
    long number = 987654321L;
    int a = 3;
    int b = 4;
    int product = a * b;
    System.out.println(digitSum(number) + product);
  }
}
