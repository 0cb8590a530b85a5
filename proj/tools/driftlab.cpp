#include "driftlab/cli.hpp"

int main(int argc, char** argv) { return driftlab::run_cli(argc, argv); }
