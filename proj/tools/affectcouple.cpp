#include <iostream>

#include "affectcouple/cli.hpp"

int main(int argc, char** argv) {
  return affectcouple::run_cli(argc, argv, std::cout, std::cerr);
}
