#include "ldhom/commands.hpp"

int main(int argc, char** argv) { return ldhom::run_cli(argc, argv); }
