public class Main {
  public static void main(String[] args) {
    double principal = 1000.0;
    double rate = 0.05;
    int years = 10;
    double amount = principal;
    int y = 0;
    while (y < years) {
      amount *= 1.0 + rate;
      y++;
    }
    double interest_earned = amount - principal;
    System.out.printf("%.2f%n", interest_earned);
  }
}
