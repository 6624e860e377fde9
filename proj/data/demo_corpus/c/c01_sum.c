#include <stdio.h>

int main(void) {
  int n = 0;
  int total = 0;
  if (scanf("%d", &n) != 1) {
    return 1;
  }
  for (int i = 0; i < n; i++) {
    int value = 0;
    scanf("%d", &value);
    total += value;
  }
  printf("%d\n", total);
  return 0;
}
