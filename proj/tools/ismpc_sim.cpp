#include "ismpc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ismpc::cli::run(argc, argv, std::cout, std::cerr); }
