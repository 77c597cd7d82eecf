#include "vinoreg/cli.hpp"

int main(int argc, char** argv) { return vinoreg::run_cli(argc, argv); }
