#include <iostream>
#include <string>
#include <vector>

#include "covr/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return covr::run_cli(args, std::cout, std::cerr);
}
