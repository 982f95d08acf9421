#include <iostream>

#include "skirental/cli.hpp"

int main(int argc, char** argv) { return skirental::cli::dispatch(argc, argv, std::cout, std::cerr); }
