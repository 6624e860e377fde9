public class Main {
  static double toFahrenheit(double celsius) {
    return celsius * 9.0 / 5.0 + 32.0;
  }

  public static void main(String[] args) {
    double start_temp = -10.0;
    double end_temp = 40.0;
    double step = 10.0;
    double current = start_temp;
    while (current <= end_temp) {
      double converted = toFahrenheit(current);
      System.out.println(current + " -> " + converted);
      current += step;
    }
  }
}
