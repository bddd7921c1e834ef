#include "kpi/cli.hpp"

int main(int argc, char** argv) { return kpi::run_cli(argc, argv); }
