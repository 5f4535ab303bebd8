#include <iostream>

#include "predq/cli/app.hpp"

int main(int argc, char** argv) { return predq::cli::run_cli(argc, argv, std::cout, std::cerr); }
