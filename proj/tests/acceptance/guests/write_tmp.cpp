#include <cstdio>

int main() {
  FILE* f = std::fopen("/tmp/testforge_hostile_probe", "w");
  if (!f) return 3;
  std::fputs("escaped", f);
  std::fclose(f);
  return 0;
}
