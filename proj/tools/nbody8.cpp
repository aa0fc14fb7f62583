#include <iostream>
#include <string>
#include <vector>

#include "choreo/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return choreo::cli_dispatch(args, std::cout, std::cerr);
}
