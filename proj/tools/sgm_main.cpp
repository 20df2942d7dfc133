#include <iostream>

#include "sgm/bench.hpp"

int main(int argc, char** argv)
{
    return sgm::bench::cli_main(argc, argv, std::cout, std::cerr);
}
