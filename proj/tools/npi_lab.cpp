#include <iostream>

#include "npi/cli.hpp"

int main(int argc, char** argv) { return npi::run_cli(argc, argv, std::cout, std::cerr); }
