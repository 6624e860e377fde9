public class Main {
  static boolean isPrime(int n) {
    if (n < 2) {
      return false;
    }
    for (int d = 2; d * d <= n; d++) {
      if (n % d == 0) {
        return false;
      }
    }
    return true;
  }

  public static void main(String[] args) {
    int primeCount = 0;
    int upperLimit = 100;
    for (int n = 0; n <= upperLimit; n++) {
      if (isPrime(n)) {
        primeCount++;
      }
    }
    System.out.println(primeCount);
  }
}
