#include <iostream>
#include <string>
#include <vector>

#include "dehaze/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dehaze::run_cli(args, std::cout, std::cerr);
}
