#include <iostream>

#include "mbeval/cli.hpp"

int main(int argc, char** argv) { return mbeval::cli::dispatch(argc, argv, std::cout, std::cerr); }
