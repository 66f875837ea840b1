#include <iostream>

#include "meroasian/cli.hpp"

int main(int argc, char** argv) { return meroasian::cli::run(argc, argv, std::cout, std::cerr); }
