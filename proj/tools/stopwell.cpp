#include "stopwell/cli.hpp"

int main(int argc, char** argv) { return stopwell::cli::run(argc, argv); }
