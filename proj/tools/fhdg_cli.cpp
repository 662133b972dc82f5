#include "fhdg/cli.hpp"

int main(int argc, char** argv)
{
    return fhdg::run_cli(argc, argv);
}
