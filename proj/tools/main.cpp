#include <iostream>

#include "mcorr/commands.hpp"

int main(int argc, char** argv) { return mcorr::run_cli(argc, argv, std::cout, std::cerr); }
