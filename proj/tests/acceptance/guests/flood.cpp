#include <cstdio>
#include <cstring>

int main() {
  static char block[1 << 16];
  std::memset(block, 'x', sizeof block);
  for (int i = 0; i < 4096; ++i) std::fwrite(block, 1, sizeof block, stdout);
  return 0;
}
