import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    int choice = sc.nextInt();
    double price = 0.0;
    int itemCount = 1;
    switch (choice) {
      case 1:
        price = 2.50;
        break;
      case 2:
        price = 3.75;
        itemCount = 2;
        break;
      case 3:
        price = 1.25;
        break;
      default:
        itemCount = 0;
        break;
    }
    System.out.println(price * itemCount);
  }
}
