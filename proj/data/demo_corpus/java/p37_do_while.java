import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int total = 0;
    int value;
    do {
      value = sc.nextInt();
      total += value;
    } while (value != 0);
    System.out.println(total);
  }
}
