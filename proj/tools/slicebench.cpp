#include "cli.hpp"

int main(int argc, char** argv) { return slicebench::cli_main(argc, argv); }
