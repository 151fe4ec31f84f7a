#include <iostream>
#include <string>
#include <vector>

#include "peergraph/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return peergraph::cli::run(args, std::cout, std::cerr);
}
