#include "evadesos/cli.hpp"

int main(int argc, char** argv) { return evadesos::run_cli(argc, argv); }
