public class Main {
  static int daysIn(int month, boolean leap) {
    switch (month) {
      case 2:
        return leap ? 29 : 28;
      case 4:
      case 6:
      case 9:
      case 11:
        return 30;
      default:
        return 31;
    }
  }

  public static void main(String[] args) {
    int totalDays = 0;
    for (int m = 1; m <= 12; m++) {
      totalDays += daysIn(m, false);
    }
    System.out.println(totalDays);
  }
}
