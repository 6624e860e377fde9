public class Main {
  static long modPow(long base, long exp, long mod) {
    long result = 1;
    base %= mod;
    while (exp > 0) {
      if ((exp & 1) == 1) {
        result = result * base % mod;
      }
      base = base * base % mod;
      exp >>= 1;
    }
    return result;
  }

  public static void main(String[] args) {
    long modulus = 1000000007L;
    System.out.println(modPow(2, 100, modulus));
  }
}
