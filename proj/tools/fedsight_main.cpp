#include "fedsight/cli.hpp"

int main(int argc, char** argv) { return fedsight::cli::run(argc, argv); }
