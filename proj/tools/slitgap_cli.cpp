#include <iostream>
#include <string>
#include <vector>

#include "slitgap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return slitgap::run_cli(args, std::cout, std::cerr);
}
