#include "gembed/cli.hpp"

int main(int argc, char** argv) { return gembed::cli::run(argc, argv); }
