#include <stdio.h>

void swap(int *a, int *b) {
  int tmp = *a;
  *a = *b;
  *b = tmp;
}

int main(void) {
  int left = 3;
  int right = 8;
  swap(&left, &right);
  int diff = left - right;
  printf("%d %d %d\n", left, right, diff);
  return 0;
}
