#include <iostream>

#include "pinacolada/cli.hpp"

int main(int argc, char **argv) {
  return pinacolada::cli::run(argc, argv, std::cout, std::cerr);
}
