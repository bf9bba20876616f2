#include <iostream>

#include "sopa/cli.hpp"

int main(int argc, char** argv) { return sopa::cli::run(argc, argv, std::cout, std::cerr); }
