import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int a = sc.nextInt();
    int b = sc.nextInt();
    int c = sc.nextInt();
    boolean valid = a + b > c && a + c > b && b + c > a;
    if (!valid) {
      System.out.println("invalid");
    } else if (a == b && b == c) {
      System.out.println("equilateral");
    } else if (a == b || b == c || a == c) {
      System.out.println("isosceles");
    } else {
      System.out.println("scalene");
    }
  }
}
