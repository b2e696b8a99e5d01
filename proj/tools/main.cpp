#include "cat0/cli.hpp"

int main(int argc, char** argv) { return cat0::cli_main(argc, argv); }
