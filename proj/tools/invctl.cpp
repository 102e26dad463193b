#include <iostream>

#include "invctl/cli.hpp"

int main(int argc, char** argv) {
  return invctl::cli::run(argc, argv, std::cout, std::cerr);
}
