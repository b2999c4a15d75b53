#include <iostream>
#include <string>
#include <vector>

#include "relaytree/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relaytree::run_cli(args, std::cout, std::cerr);
}
