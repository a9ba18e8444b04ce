#include <iostream>

#include "fjcert_cli/commands.hpp"

int main(int argc, char** argv) { return fjcert::cli::run(argc, argv, std::cout, std::cerr); }
