#include "cli.hpp"

int main(int argc, char** argv) { return phasegp::cli::run(argc, argv); }
