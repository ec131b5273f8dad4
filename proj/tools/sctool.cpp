#include "sc/cli.hpp"

int main(int argc, char** argv) { return sc::cli::main_entry(argc, argv); }
