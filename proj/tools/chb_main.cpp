#include <iostream>
#include <string>
#include <vector>

#include "chb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return chb::dispatch(args, std::cout, std::cerr);
}
