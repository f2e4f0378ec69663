#include "snls/cli.hpp"

int main(int argc, char** argv) { return snls::run_cli(argc, argv); }
