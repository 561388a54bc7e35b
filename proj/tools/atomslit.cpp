#include <iostream>

#include "atomslit/cli/commands.hpp"

int main(int argc, char** argv) {
  return atomslit::cli::run(argc, argv, std::cout, std::cerr);
}
