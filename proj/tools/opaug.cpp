#include <iostream>

#include "opaug/cli.hpp"

int main(int argc, char** argv) { return opaug::run_cli(argc, argv, std::cout, std::cerr); }
