#include "cli.hpp"

int main(int argc, char** argv) { return mbh::cli::run(argc, argv); }
