#include <iostream>

#include "pnpair/cli.hpp"

int main(int argc, char** argv) { return pnpair::cli::run(argc, argv, std::cout, std::cerr); }
