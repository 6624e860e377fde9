#include <stdio.h>

int main(void) {
  int score = 83;
  char grade = 'F';
  if (score >= 90) {
    grade = 'A';
  } else if (score >= 80) {
    grade = 'B';
  } else if (score >= 70) {
    grade = 'C';
  }
  int passed = score >= 60;
  printf("%c %d\n", grade, passed);
  return 0;
}
