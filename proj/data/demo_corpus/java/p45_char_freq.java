public class Main {
  public static void main(String[] args) {
    String input = "mississippi";
    int[] freq = new int[26];
    for (char ch : input.toCharArray()) {
      freq[ch - 'a']++;
    }
    int best = 0;
    char bestChar = 'a';
    for (int i = 0; i < 26; i++) {
      if (freq[i] > best) {
        best = freq[i];
        bestChar = (char) ('a' + i);
      }
    }
    System.out.println(bestChar + " " + best);
  }
}
