#include <iostream>

#include "dwreg/cli.hpp"

int main(int argc, char** argv) {
  return dwreg::cli::run(argc, argv, std::cout, std::cerr);
}
