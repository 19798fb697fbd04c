#include <iostream>

#include "minent/cli.hpp"

int main(int argc, char** argv) { return minent::run_cli(argc, argv, std::cout, std::cerr); }
