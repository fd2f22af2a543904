#include "coughdet/cli.hpp"

int main(int argc, char** argv) { return coughdet::cli::run(argc, argv); }
