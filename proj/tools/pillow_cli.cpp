#include <iostream>

#include "pillow/cli.hpp"

int main(int argc, char** argv) { return pillow::cli_main(argc, argv, std::cout, std::cerr); }
