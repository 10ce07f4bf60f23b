#include <iostream>

#include "pflow/cli.h"

int main(int argc, char** argv) { return pflow::cli_main(argc, argv, std::cout, std::cerr); }
