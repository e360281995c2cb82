#include <iostream>

#include "dispatchsim/cli.hpp"

int main(int argc, char** argv) { return dispatchsim::run_cli(argc, argv, std::cout, std::cerr); }
