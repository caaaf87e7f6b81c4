#include <iostream>

#include "rxchain/cli.hpp"

int main(int argc, char** argv) { return rxchain::cli::run(argc, argv, std::cout, std::cerr); }
