#include "ccsk/harness/cli.hpp"

int main(int argc, char** argv) { return ccsk::cli::run_cli(argc, argv); }
