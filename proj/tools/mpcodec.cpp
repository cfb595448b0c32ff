#include "mpc/commands.hpp"

int main(int argc, char** argv) { return mpc::run_cli(argc, argv); }
