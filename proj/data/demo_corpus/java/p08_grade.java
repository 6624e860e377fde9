import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    char grade = sc.next().charAt(0);
    int points = 0;
    switch (grade) {
      case 'A':
        points = 4;
        break;
      case 'B':
        points = 3;
        break;
      case 'C':
        points = 2;
        break;
      default:
        points = 0;
        break;
    }
    System.out.println(points);
  }
}
