public class Main {
  static boolean isPalindrome(String s) {
    int i = 0;
    int j = s.length() - 1;
    while (i < j) {
      if (s.charAt(i) != s.charAt(j)) {
        return false;
      }
      i++;
      j--;
    }
    return true;
  }

  public static void main(String[] args) {
    String[] words = {"level", "java", "racecar", "code"};
    int found = 0;
    for (String w : words) {
      if (isPalindrome(w)) {
        found++;
      }
    }
    System.out.println(found);
  }
}
