#include "billiard/cli.hpp"

int main(int argc, char** argv) { return billiard::cli::run(argc, argv); }
