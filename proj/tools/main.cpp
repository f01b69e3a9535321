#include "markerforge/cli.hpp"

int main(int argc, char** argv) { return markerforge::run_cli(argc, argv); }
