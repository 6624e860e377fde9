public class Main {
  public static void main(String[] args) {
    int light_state = 2;
    String action;
    switch (light_state) {
      case 0:
        action = "stop";
        break;
      case 1:
        action = "slow";
        break;
      case 2:
        action = "go";
        break;
      default:
        action = "unknown";
    }
    System.out.println(action);
  }
}
