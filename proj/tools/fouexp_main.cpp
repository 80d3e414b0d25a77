#include "fouexp/cli.hpp"

int main(int argc, char** argv) { return fouexp::cli::run(argc, argv); }
