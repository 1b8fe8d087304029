#include "cli.hpp"

int main(int argc, char** argv) { return ginprod::cli::run(argc, argv); }
