#include <stdio.h>

long factorial(int n) {
  long acc = 1;
  int k = 2;
  while (k <= n) {
    acc = acc * k;
    k++;
  }
  return acc;
}

int main(void) {
  int limit = 10;
  long value = factorial(limit);
  printf("%ld\n", value);
  return 0;
}
