#include "ludwick/cli.hpp"

int main(int argc, char** argv) { return ludwick::cli::run(argc, argv); }
