#include "commands.hpp"

int main(int argc, char** argv) { return mpcpen::cli::run_cli(argc, argv); }
