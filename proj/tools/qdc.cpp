#include <iostream>
#include <string>
#include <vector>

#include "qdc/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return qdc::cli::run(args, std::cout, std::cerr);
}
