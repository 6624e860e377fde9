public class Main {
  public static void main(String[] args) {
    int coin = 25;
    int cents = 0;
    int coins = 0;
    switch (coin) {
      case 1:
        cents = 1;
        coins++;
        break;
      case 5:
        cents = 5;
        coins++;
        break;
      case 10:
        cents = 10;
        coins++;
        break;
      case 25:
        cents = 25;
        coins++;
        break;
      default:
        System.out.println("rejected");
    }
    System.out.println(cents + " " + coins);
  }
}
