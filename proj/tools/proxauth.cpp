#include "proxauth/cli.hpp"

int main(int argc, char** argv) { return proxauth::cli::main(argc, argv); }
