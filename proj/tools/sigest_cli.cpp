#include "sigest/cli.hpp"

int main(int argc, char** argv) { return sigest::run_cli(argc, argv); }
