#include "cli.hpp"

int main(int argc, char** argv) { return sepec::cli::run(argc, argv); }
