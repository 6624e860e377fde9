import java.util.LinkedList;
import java.util.Queue;

public class Main {
  public static void main(String[] args) {
    Queue<Integer> queue = new LinkedList<>();
    int time_now = 0;
    int quantum = 3;
    queue.add(5);
    queue.add(2);
    queue.add(7);
    while (!queue.isEmpty()) {
      int job = queue.poll();
      if (job > quantum) {
        time_now += quantum;
        queue.add(job - quantum);
      } else {
        time_now += job;
      }
    }
    System.out.println(time_now);
  }
}
