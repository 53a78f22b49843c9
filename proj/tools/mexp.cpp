#include <iostream>

#include "mexp/cli.hpp"

int main(int argc, char** argv) { return mexp::cli::run(argc, argv, std::cout, std::cerr); }
