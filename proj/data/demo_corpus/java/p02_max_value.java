import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int count = sc.nextInt();
    int maxValue = Integer.MIN_VALUE;
    int index = 0;
    while (index < count) {
      int current = sc.nextInt();
      if (current > maxValue) {
        maxValue = current;
      }
      index++;
    }
    System.out.println(maxValue);
  }
}
