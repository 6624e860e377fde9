public class Main {
  static String dayName(int day) {
    String name;
    switch (day) {
      case 1:
        name = "Monday";
        break;
      case 2:
        name = "Tuesday";
        break;
      case 3:
        name = "Wednesday";
        break;
      case 6:
      case 7:
        name = "Weekend";
        break;
      default:
        name = "Other";
    }
    return name;
  }

  public static void main(String[] args) {
    for (int d = 1; d <= 7; d++) {
      System.out.println(dayName(d));
    }
  }
}
