// SPDX-License-Identifier: Apache-2.0
#include "starm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return starm::run_cli(argc, argv, std::cout, std::cerr); }
