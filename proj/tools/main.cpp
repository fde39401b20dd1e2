#include "runner.hpp"

int main(int argc, char** argv) { return hawking::cli::main_entry(argc, argv); }
