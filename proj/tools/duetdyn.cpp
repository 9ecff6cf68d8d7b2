#include <iostream>
#include <string>
#include <vector>

#include "duetdyn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return duetdyn::cli::run_command(args, std::cout, std::cerr);
}
