#include <iostream>
#include <string>
#include <vector>

#include "reacquire/cli.hpp"

int main(int argc, char** argv) {
    return reacquire::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
