#include <iostream>

#include "rldp/cli.hpp"

int main(int argc, char** argv) { return rldp::cli::run(argc, argv, std::cout, std::cerr); }
