#include <iostream>
#include <string>
#include <vector>

#include "gseg3d_cli/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return gseg3d::cli::run(args, std::cout, std::cerr);
}
