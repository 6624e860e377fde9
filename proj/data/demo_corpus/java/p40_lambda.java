import java.util.Arrays;
import java.util.List;

public class Main {
  public static void main(String[] args) {
    List<String> names = Arrays.asList("delta", "alpha", "charlie", "bravo");
    int minLength = 5;
    long longNames = names.stream().filter(s -> s.length() >= minLength).count();
    names.sort((left, right) -> left.compareTo(right));
    System.out.println(longNames + " " + names.get(0));
  }
}
