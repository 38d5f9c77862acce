#include <iostream>

#include "mpnd/cli.hpp"

int main(int argc, char** argv) { return mpnd::run_cli(argc, argv, std::cout, std::cerr); }
