#include <iostream>

#include "runner/experiment.hpp"

int main(int argc, char** argv) {
  return twinsim::runner::run_cli(argc, argv, std::cout, std::cerr);
}
