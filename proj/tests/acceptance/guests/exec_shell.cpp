#include <unistd.h>

int main() {
  char arg0[] = "/bin/sh";
  char* argv[] = {arg0, nullptr};
  execv("/bin/sh", argv);
  return 6;
}
