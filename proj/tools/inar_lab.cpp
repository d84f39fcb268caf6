#include "inar_lab/cli.hpp"

int main(int argc, char** argv) { return inar::cli::run(argc, argv); }
