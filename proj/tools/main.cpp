#include <iostream>

#include "armcal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return armcal::run_command(args, std::cout, std::cerr);
}
