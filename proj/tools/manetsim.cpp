#include "manet/cli.hpp"

int main(int argc, char** argv) { return manet::run_cli(argc, argv); }
