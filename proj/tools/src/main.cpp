#include <iostream>

#include "corrlss_cli/cli.hpp"

int main(int argc, char** argv) { return corrlss::cli::main_entry(argc, argv, std::cout, std::cerr); }
