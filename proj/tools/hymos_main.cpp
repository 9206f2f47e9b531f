#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "hymos/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return hymos::cli::run_cli(args, std::cout, std::cerr, std::getenv("HYMOS_SEED"));
}
