import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int year = sc.nextInt();
    boolean is_leap = false;
    if (year % 400 == 0) {
      is_leap = true;
    } else if (year % 100 == 0) {
      is_leap = false;
    } else if (year % 4 == 0) {
      is_leap = true;
    }
    System.out.println(is_leap ? "Yes" : "No");
  }
}
