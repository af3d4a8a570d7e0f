#include <iostream>

#include "letrecopt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return letrecopt::runCommand(args, std::cout, std::cerr);
}
