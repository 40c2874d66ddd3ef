#include <iostream>

int main() {
  int v[3];
  std::cin >> v[0] >> v[1] >> v[2];
  int best = 2;
  for (int i = 1; i >= 0; --i)
    if (v[i] > v[best]) best = i;
  std::cout << best << "\n";
}
