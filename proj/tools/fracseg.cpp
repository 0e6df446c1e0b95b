#include <iostream>
#include <string>
#include <vector>

#include "fracseg/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fracseg::run_cli(args, std::cout, std::cerr);
}
