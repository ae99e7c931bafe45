#include "aderdg/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return aderdg::run_cli(argc, argv, std::cout, std::cerr); }
