public class Main {
  public static void main(String[] args) {
    double[] samples = {2.5, 3.5, 4.0, 1.0};
    double running_total = 0.0;
    int seen = 0;
    for (double sample : samples) {
      running_total += sample;
      seen++;
      double average = running_total / seen;
      System.out.println(average);
    }
  }
}
