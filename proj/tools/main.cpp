#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return robsub::cli::run(argc, argv, std::cout, std::cerr); }
