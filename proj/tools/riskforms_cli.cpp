#include <iostream>
#include <string>
#include <vector>

#include "riskforms/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return riskforms::cli::run(args, std::cout);
}
