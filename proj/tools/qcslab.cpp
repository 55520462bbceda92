#include <iostream>

#include "qcslab/commands.hpp"

int main(int argc, char** argv) { return qcslab::run_cli(argc, argv, std::cout, std::cerr); }
