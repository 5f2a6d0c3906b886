#include <iostream>

#include "fracstar/cli/commands.hpp"

int main(int argc, char** argv) { return fracstar::cli::run(argc, argv, std::cout, std::cerr); }
