#include "rmo/cli.hpp"

int main(int argc, char** argv)
{
    return rmo::cli::run(argc, argv);
}
