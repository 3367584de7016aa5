#include <iostream>
#include <string>
#include <vector>

#include "tsvf/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return tsvf::cli::run(args, std::cout, std::cerr);
}
