#include <iostream>
#include <vector>

#include "equinet/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return equinet::cli_main(std::move(args), std::cout, std::cerr);
}
