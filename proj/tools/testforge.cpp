#include "testforge/interface/cli.hpp"

int main(int argc, char** argv) { return testforge::interface::cli_main(argc, argv); }
