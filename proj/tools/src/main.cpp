#include "striplab/cli.hpp"

int main(int argc, char** argv) { return striplab::cli::run(argc, argv); }
