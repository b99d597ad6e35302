#include <iostream>

#include "domsplit/cli.hpp"

int main(int argc, char** argv) {
  return domsplit::cli::run(argc, argv, std::cout, std::cerr);
}
