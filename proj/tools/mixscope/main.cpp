#include "mixscope/cli.hpp"

int main(int argc, char** argv) { return mixscope::cli::cli_dispatch(argc, argv); }
