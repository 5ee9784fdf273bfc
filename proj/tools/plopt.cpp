#include "plopt/cli.hpp"

int main(int argc, char** argv) { return plopt::cli::run(argc, argv); }
