#include "uwb1a/cli.hpp"

int main(int argc, char** argv) { return uwb1a::cli::run(argc, argv); }
