#include "adastep/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return adastep::run_cli(argc, argv, std::cout, std::cerr); }
