#include "cubicpart/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cubicpart::cli::run(argc, argv, std::cout, std::cerr); }
