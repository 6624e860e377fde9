public class Main {
  static String label(int level) {
    String text = "";
    switch (level) {
      case -1:
        text = "below";
        break;
      case 0:
        text = "zero";
        break;
      case 1:
        text = "one";
        break;
    }
    return text;
  }

  public static void main(String[] args) {
    int x = 0;
    int y = 1;
    System.out.println(label(x) + label(y));
  }
}
