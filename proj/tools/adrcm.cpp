#include "adrcm/cli.hpp"

int main(int argc, char** argv) { return adrcm::cli::main(argc, argv); }
