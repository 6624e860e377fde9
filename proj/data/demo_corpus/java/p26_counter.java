public class Main {
  private int hits;
  private int misses;

  Main() {
    this(0, 0);
  }

  Main(int hits, int misses) {
    this.hits = hits;
    this.misses = misses;
  }

  void record(boolean hit) {
    if (hit) {
      hits++;
    } else {
      misses++;
    }
  }

  double ratio() {
    int total = hits + misses;
    if (total == 0) {
      return 0.0;
    }
    return (double) hits / total;
  }

  public static void main(String[] args) {
    Main counter = new Main();
    for (int i = 0; i < 10; i++) {
      counter.record(i % 3 != 0);
    }
    System.out.println(counter.ratio());
  }
}
