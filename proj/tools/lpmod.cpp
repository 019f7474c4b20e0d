#include <iostream>

#include "lpmod/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lpmod::cli::run(args, std::cout, std::cerr);
}
