#include "cli.hpp"

int main(int argc, char** argv) { return mvd::cli::run_cli(argc, argv); }
