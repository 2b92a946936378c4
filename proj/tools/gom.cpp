#include <iostream>

#include "gom/cli.hpp"

int main(int argc, char** argv) { return gom::run_cli(argc, argv, std::cout, std::cerr); }
