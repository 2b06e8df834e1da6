#include <iostream>

#include "repsim/cli.hpp"

int main(int argc, char** argv) { return repsim::cli::run(argc, argv, std::cout, std::cerr); }
