public class Main {
  public static void main(String[] args) {
    int n = 20;
    long prev = 0;
    long curr = 1;
    int step = 1;
    while (step < n) {
      long next_value = prev + curr;
      prev = curr;
      curr = next_value;
      step++;
    }
    System.out.println(curr);
  }
}
