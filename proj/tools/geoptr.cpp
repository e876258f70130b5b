#include <iostream>

#include "geoptr/harness/cli.hpp"

int main(int argc, char** argv) {
  return geoptr::harness::run_cli(argc, argv, std::cout, std::cerr);
}
