#include "afmpi/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return afmpi::cli::run(argc, argv, std::cout, std::cerr); }
