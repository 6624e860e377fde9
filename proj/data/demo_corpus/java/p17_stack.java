import java.util.ArrayDeque;
import java.util.Deque;

public class Main {
  public static void main(String[] args) {
    String expr = "(()())(()";
    Deque<Character> stack = new ArrayDeque<>();
    int unmatched = 0;
    for (int i = 0; i < expr.length(); i++) {
      char ch = expr.charAt(i);
      if (ch == '(') {
        stack.push(ch);
      } else if (stack.isEmpty()) {
        unmatched++;
      } else {
        stack.pop();
      }
    }
    unmatched += stack.size();
    System.out.println(unmatched);
  }
}
