#include "pvbess/cli.hpp"

int main(int argc, char** argv) { return pvbess::cli::run(argc, argv); }
