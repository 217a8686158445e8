#include <iostream>
#include <string>
#include <vector>

#include "embalign/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return embalign::cli::run(args, std::cout, std::cerr);
}
