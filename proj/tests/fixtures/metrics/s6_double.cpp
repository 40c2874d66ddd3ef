#include <cstdio>

int main() {
  double a, b;
  std::scanf("%lf %lf", &a, &b);
  std::printf("%.0f\n", a + b);
}
