#include <iostream>

#include "blockcode/cli/app.hpp"

int main(int argc, char** argv) {
  return blockcode::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
