#include "tfz/cli.hpp"

int main(int argc, char** argv) { return tfz::run_cli(argc, argv); }
