#include "lpm/cli.hpp"

int main(int argc, char** argv) { return lpm::cli_main(argc, argv); }
