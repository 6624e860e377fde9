#include <stdio.h>

int main(void) {
  double sum = 0.0;
  int count = 4;
  double samples[4] = {1.5, 2.5, 3.0, 4.0};
  for (int i = 0; i < count; i++) {
    sum += samples[i];
  }
  double mean = sum / count;
  printf("%.2f\n", mean);
  return 0;
}
