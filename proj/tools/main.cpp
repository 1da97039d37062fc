#include <iostream>

#include "asynccpuc/cli.hpp"

int main(int argc, char** argv) {
    return asynccpuc::cli::run(argc, argv, std::cout, std::cerr);
}
