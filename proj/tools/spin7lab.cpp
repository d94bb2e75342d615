#include <iostream>

#include "spin7/cli.hpp"

int main(int argc, char** argv)
{
    return spin7::cli::run(argc, argv, std::cout, std::cerr);
}
