#include "cli.hpp"

int main(int argc, char** argv) { return hdsg::cli::run(argc, argv); }
