#include "exactdiff/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return exactdiff::cli::run(argc, argv, std::cout, std::cerr); }
