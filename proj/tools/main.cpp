#include <iostream>

#include "halfcrack/cli.hpp"

int main(int argc, char** argv)
{
    return halfcrack::run_cli(argc, argv, std::cout, std::cerr);
}
