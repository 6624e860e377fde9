#include <stdio.h>

int main(void) {
  long number = 9876543;
  int digit_sum = 0;
  unsigned int digits = 0;
  while (number > 0) {
    digit_sum += number % 10;
    number /= 10;
    digits++;
  }
  printf("%d %u\n", digit_sum, digits);
  return 0;
}
