import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int lhs = sc.nextInt();
    String op = sc.next();
    int rhs = sc.nextInt();
    int answer;
    switch (op) {
      case "+":
        answer = lhs + rhs;
        break;
      case "-":
        answer = lhs - rhs;
        break;
      case "*":
        answer = lhs * rhs;
        break;
      default:
        answer = 0;
        break;
    }
    System.out.println(answer);
  }
}
