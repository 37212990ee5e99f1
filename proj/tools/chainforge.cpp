#include <iostream>

#include "chainforge/cli.hpp"

int main(int argc, char** argv) { return chainforge::cli::main_entry(argc, argv, std::cout, std::cerr); }
