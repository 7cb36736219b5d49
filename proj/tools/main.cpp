#include <iostream>
#include <string>
#include <vector>

#include "dpdrive/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return dpdrive::run_cli(args, std::cout, std::cerr);
}
