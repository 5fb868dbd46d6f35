#include "lapexp/cli.hpp"

int main(int argc, char** argv) { return lapexp::run_cli(argc, argv); }
