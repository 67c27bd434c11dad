#include "q3p/cli.hpp"

int main(int argc, char** argv) { return q3p::run_cli(argc, argv); }
