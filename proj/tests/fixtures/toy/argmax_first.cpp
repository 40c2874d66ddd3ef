#include <cstdio>

int main() {
  int v[3];
  if (std::scanf("%d %d %d", &v[0], &v[1], &v[2]) != 3) return 1;
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (v[i] > v[best]) best = i;
  std::printf("%d\n", best);
}
