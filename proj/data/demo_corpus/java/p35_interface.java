public class Main {
  interface Greeter {
    String greet(String name);
  }

  static class Polite implements Greeter {
    private final String prefix;

    Polite(String prefix) {
      this.prefix = prefix;
    }

    public String greet(String name) {
      String message = prefix + ", " + name;
      return message;
    }
  }

  public static void main(String[] args) {
    Greeter g = new Polite("Hello");
    String who = "world";
    System.out.println(g.greet(who));
  }
}
