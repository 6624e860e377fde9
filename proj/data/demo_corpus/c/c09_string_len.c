#include <stdio.h>

int length_of(const char *s) {
  int n = 0;
  while (s[n] != '\0') {
    n++;
  }
  return n;
}

int main(void) {
  const char *word = "concept";
  int len = length_of(word);
  int doubled = len * 2;
  printf("%d %d\n", len, doubled);
  return 0;
}
