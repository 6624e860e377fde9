public class Main {
  abstract static class Shape {
    abstract double area();
  }

  static class Circle extends Shape {
    private final double radius;

    Circle(double radius) {
      super();
      this.radius = radius;
    }

    @Override
    double area() {
      return Math.PI * radius * radius;
    }
  }

  static class Rect extends Shape {
    private final double w;
    private final double h;

    Rect(double w, double h) {
      this.w = w;
      this.h = h;
    }

    @Override
    double area() {
      return w * h;
    }
  }

  public static void main(String[] args) {
    Shape[] shapes = {new Circle(1.0), new Rect(2.0, 3.0)};
    double total = 0;
    for (Shape s : shapes) {
      total += s.area();
    }
    System.out.printf("%.3f%n", total);
  }
}
