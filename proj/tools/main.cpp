#include "lanmsff_cli.hpp"

int main(int argc, char** argv) { return lanmsff::cli::run(argc, argv); }
