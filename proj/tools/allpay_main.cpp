#include <iostream>
#include <string>
#include <vector>

#include "allpay/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return allpay::run_cli(args, std::cout, std::cerr);
}
