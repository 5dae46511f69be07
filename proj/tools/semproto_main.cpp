#include <iostream>

#include "semproto/cli.hpp"

int main(int argc, char** argv) { return semproto::run_cli(argc, argv, std::cout, std::cerr); }
