#include <iostream>

#include "gridfuse/cli/cli.hpp"

int main(int argc, char** argv) {
    return gridfuse::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
