#include "spinpart/scenarios.hpp"

int main(int argc, char** argv) { return spinpart::cli::cli_main(argc, argv); }
