#include <iostream>
#include <string>
#include <vector>

#include "attestgame/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return attestgame::cli::run(args, std::cout, std::cerr);
}
