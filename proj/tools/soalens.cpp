#include <iostream>

#include "soalens/cli.hpp"

int main(int argc, char** argv) { return soalens::run_cli(argc, argv, std::cout, std::cerr); }
