#include <iostream>

#include "zdr/cli.hpp"

int main(int argc, char** argv) { return zdr::cli::run(argc, argv, std::cout, std::cerr); }
