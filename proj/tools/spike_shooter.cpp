#include <iostream>

#include "spike/cli_io.hpp"

int main(int argc, char** argv) { return spike::run_cli(argc, argv, std::cout, std::cerr); }
