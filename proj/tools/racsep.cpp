#include <iostream>

#include "racsep/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return racsep::run_cli(args, std::cout, std::cerr);
}
