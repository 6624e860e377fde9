import java.util.Scanner;

public class Main {
  static int gcd(int a, int b) {
    while (b != 0) {
      int t = a % b;
      a = b;
      b = t;
    }
    return a;
  }

  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int first_num = sc.nextInt();
    int second_num = sc.nextInt();
    int result = gcd(first_num, second_num);
    System.out.println(result);
  }
}
