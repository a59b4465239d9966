#include "quditfuse_cli/cli.hpp"

int main(int argc, char** argv) { return quditfuse::cli::run(argc, argv); }
