#include <iostream>

#include "wsp/cli.hpp"

int main(int argc, char** argv) { return wsp::cli::run(argc, argv, std::cin, std::cout, std::cerr); }
