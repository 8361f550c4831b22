#include <iostream>
#include <string>
#include <vector>

#include "stablelab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stablelab::cli::dispatch(args, std::cout, std::cerr);
}
