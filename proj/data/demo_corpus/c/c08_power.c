#include <stdio.h>

long power(long base, int exp) {
  long result = 1;
  while (exp > 0) {
    if (exp % 2 == 1) {
      result *= base;
    }
    base *= base;
    exp /= 2;
  }
  return result;
}

int main(void) {
  int e = 10;
  long p = power(2, e);
  printf("%ld\n", p);
  return 0;
}
