#include "tacshear/cli.hpp"

int main(int argc, char** argv) { return tacshear::run_cli(argc, argv); }
