#include "scorecraft/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return scorecraft::run_cli(argc, argv, std::cout, std::cerr); }
