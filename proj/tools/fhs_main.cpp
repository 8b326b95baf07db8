#include <iostream>

#include "fhs/cli.hpp"

int main(int argc, char** argv) { return fhs::run_cli(argc, argv, std::cout, std::cerr); }
