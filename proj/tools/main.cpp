#include "gamehedge/cli.hpp"

int main(int argc, char** argv) { return gamehedge::run_cli(argc, argv); }
