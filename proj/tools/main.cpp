#include "sinrldp/cli.hpp"

int main(int argc, char** argv) { return sinrldp::cli_main(argc, argv); }
