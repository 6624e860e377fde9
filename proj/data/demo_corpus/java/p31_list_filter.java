import java.util.ArrayList;
import java.util.List;

public class Main {
  public static void main(String[] args) {
    List<Integer> numbers = new ArrayList<>();
    for (int i = 0; i < 20; i++) {
      numbers.add(i * 7 % 11);
    }
    List<Integer> evens = new ArrayList<>();
    for (int n : numbers) {
      if (n % 2 == 0) {
        evens.add(n);
      }
    }
    System.out.println(evens.size());
  }
}
