#include "cli.hpp"

int main(int argc, char** argv) { return hilbvp::cli::run(argc, argv); }
