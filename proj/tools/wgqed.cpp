#include "wgqed/app/commands.h"

#include <iostream>

int main(int argc, char **argv)
{
    return wgqed::app::run_cli(argc, argv, std::cout, std::cerr);
}
