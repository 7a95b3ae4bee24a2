#include <iostream>

#include "lexmemm/cli.hpp"

int main(int argc, char** argv) { return lexmemm::cli::run(argc, argv, std::cout, std::cerr); }
