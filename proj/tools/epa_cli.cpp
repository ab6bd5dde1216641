#include <epa/cli.hpp>

int main(int argc, char** argv) { return epa::cli::run(argc, argv); }
