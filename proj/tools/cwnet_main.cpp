#include <iostream>

#include "cwnet/cli.hpp"

int main(int argc, char** argv) { return cwnet::cli::run(argc, argv, std::cout, std::cerr); }
