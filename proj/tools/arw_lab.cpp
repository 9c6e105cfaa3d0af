#include "arw/cli.hpp"

int main(int argc, char** argv) { return arw::cli::run(argc, argv); }
