#include "axiflow/cli.hpp"

int main(int argc, char** argv) { return axiflow::cli::cli_main(argc, argv); }
