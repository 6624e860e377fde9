public class Main {
  private long started_at;
  private long stopped_at;

  void start(long now) {
    started_at = now;
  }

  void stop(long now) {
    stopped_at = now;
  }

  long elapsed() {
    long delta = stopped_at - started_at;
    if (delta < 0) {
      delta = 0;
    }
    return delta;
  }

  public static void main(String[] args) {
    Main timer = new Main();
    long t0 = 100;
    long t1 = 250;
    timer.start(t0);
    timer.stop(t1);
    System.out.println(timer.elapsed());
  }
}
