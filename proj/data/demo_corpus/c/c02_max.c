#include <stdio.h>

int max_of(const int *arr, int len) {
  int best = arr[0];
  int idx = 1;
  while (idx < len) {
    if (arr[idx] > best) {
      best = arr[idx];
    }
    idx++;
  }
  return best;
}

int main(void) {
  int data[5] = {4, 9, 2, 7, 5};
  int result = max_of(data, 5);
  printf("%d\n", result);
  return 0;
}
