#include <iostream>

#include "ptinv/cli.hpp"

int main(int argc, char** argv) { return ptinv::cli_main(argc, argv, std::cout, std::cerr); }
