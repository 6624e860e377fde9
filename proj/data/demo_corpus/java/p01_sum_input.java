import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int n = sc.nextInt();
    int sum1 = 0;
    for (int i = 0; i < n; i++) {
      int value = sc.nextInt();
      sum1 += value;
    }
    System.out.println(sum1);
  }
}
