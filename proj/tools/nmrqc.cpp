#include <cstdio>

#include "vendor/CLI11.hpp"

int main(int argc, char** argv) {
  CLI::App app{"nmrqc: liquid-state NMR quantum computing simulator"};
  app.require_subcommand(0, 1);
  CLI11_PARSE(app, argc, argv);
  std::puts("nmrqc: no subcommand given (placeholder build)");
  return 0;
}
