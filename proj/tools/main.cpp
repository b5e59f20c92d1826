#include "cli.hpp"

int main(int argc, char** argv) { return mmb::cli::run(argc, argv); }
