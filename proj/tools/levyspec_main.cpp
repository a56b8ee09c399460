#include <iostream>
#include <string>
#include <vector>

#include "levyspec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return levyspec::run_cli(args, std::cout, std::cerr);
}
