#include "lvb/cli.hpp"

int main(int argc, char** argv) { return lvb::cli::run_main(argc, argv); }
