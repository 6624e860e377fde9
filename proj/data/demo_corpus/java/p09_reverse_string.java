import java.util.Scanner;

public class Main {
  public static void main(String[] args) {
    Scanner sc = new Scanner(System.in);
    String line = sc.nextLine();
    int length = line.length();
    char[] chars = new char[length];
    int left = 0;
    int right = length - 1;
    while (left <= right) {
      chars[left] = line.charAt(right);
      chars[right] = line.charAt(left);
      left++;
      right--;
    }
    System.out.println(new String(chars));
  }
}
