#include "epicast/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return epicast::cli::run(argc, argv, std::cout, std::cerr);
}
