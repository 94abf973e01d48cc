#include <cstdio>

int main() {
  std::puts("grasplab: subcommands not wired yet");
  return 2;
}
