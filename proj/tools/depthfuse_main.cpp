#include "depthfuse/cli.hpp"

int main(int argc, char** argv) { return depthfuse::run_cli(argc, argv); }
