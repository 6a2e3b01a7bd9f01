#include <iostream>
#include <string>
#include <vector>

#include "rtpca/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return rtpca::cli::dispatch(args, std::cout, std::cerr);
}
