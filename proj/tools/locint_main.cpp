#include <cstdio>

#include "locint/version.hpp"

int main(int argc, char** argv) {
  (void)argc;
  (void)argv;
  std::printf("%s\n", locint::kBuildFingerprint);
  return 0;
}
