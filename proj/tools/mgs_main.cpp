#include <iostream>

#include "mgs/cli.hpp"

int main(int argc, char** argv) { return mgs::cli::run(argc, argv, std::cout, std::cerr); }
