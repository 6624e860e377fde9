import java.util.HashMap;
import java.util.Map;

public class Main {
  public static void main(String[] args) {
    String text = "the quick brown fox jumps over the lazy dog the end";
    Map<String, Integer> counts = new HashMap<>();
    for (String word : text.split(" ")) {
      counts.merge(word, 1, Integer::sum);
    }
    int the_count = counts.get("the");
    System.out.println(the_count);
  }
}
