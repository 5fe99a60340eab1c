#include "cdpep/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cdpep::cli::run(argc, argv, std::cout, std::cerr); }
