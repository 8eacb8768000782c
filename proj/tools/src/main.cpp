#include "seabed_cli/cli.hpp"

int main(int argc, char** argv) { return seabed::cli::run_cli(argc, argv); }
