#include "nheat/cli.hpp"

int main(int argc, char** argv) { return nheat::cli::run(argc, argv); }
