public class Main {
  static int parseOrDefault(String raw, int fallback) {
    try {
      return Integer.parseInt(raw);
    } catch (NumberFormatException e) {
      return fallback;
    }
  }

  public static void main(String[] args) {
    String[] inputs = {"12", "x", "30"};
    int total = 0;
    for (String input : inputs) {
      total += parseOrDefault(input, -1);
    }
    System.out.println(total);
  }
}
