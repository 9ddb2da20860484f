#include <iostream>
#include <string>
#include <vector>

#include "nkcert/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return nkcert::cli::run(args, std::cout, std::cerr);
}
