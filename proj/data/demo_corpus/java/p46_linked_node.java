public class Main {
  static class Node {
    int value;
    Node next;

    Node(int value, Node next) {
      this.value = value;
      this.next = next;
    }
  }

  public static void main(String[] args) {
    Node head = null;
    for (int i = 5; i > 0; i--) {
      head = new Node(i, head);
    }
    int total = 0;
    Node cursor = head;
    while (cursor != null) {
      total += cursor.value;
      cursor = cursor.next;
    }
    System.out.println(total);
  }
}
