#include "netxfer/cli/commands.hpp"

int main(int argc, char** argv) { return netxfer::cli::run_cli(argc, argv); }
