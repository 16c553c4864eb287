#include <iostream>

#include "tdyn/cli.hpp"

int main(int argc, char** argv) {
  return tdyn::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
