import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    String command = sc.next();
    int stackDepth = 0;
    switch (command) {
      case "push":
        stackDepth = 1;
        break;
      case "pop":
        stackDepth = -1;
        break;
      case "peek":
        stackDepth = 0;
        break;
      default:
        System.out.println("unknown");
    }
    System.out.println(stackDepth);
  }
}
