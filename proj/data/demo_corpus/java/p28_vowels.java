public class Main {
  static boolean isVowel(char c) {
    switch (c) {
      case 'a':
      case 'e':
      case 'i':
      case 'o':
      case 'u':
        return true;
      default:
        return false;
    }
  }

  public static void main(String[] args) {
    String sentence = "programming languages are fun";
    int vowel_count = 0;
    for (int i = 0; i < sentence.length(); i++) {
      if (isVowel(sentence.charAt(i))) {
        vowel_count++;
      }
    }
    System.out.println(vowel_count);
  }
}
