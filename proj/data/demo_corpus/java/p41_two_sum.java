import java.util.HashMap;
import java.util.Map;

public class Main {
  public static void main(String[] args) {
    int[] nums = {2, 7, 11, 15};
    int target = 9;
    Map<Integer, Integer> seen = new HashMap<>();
    int answer_a = -1;
    int answer_b = -1;
    for (int i = 0; i < nums.length; i++) {
      int need = target - nums[i];
      if (seen.containsKey(need)) {
        answer_a = seen.get(need);
        answer_b = i;
        break;
      }
      seen.put(nums[i], i);
    }
    System.out.println(answer_a + " " + answer_b);
  }
}
