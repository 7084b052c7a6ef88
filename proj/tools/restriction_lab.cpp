#include "driver/cli.hpp"

int main(int argc, char** argv) { return restriction_lab::driver::cli_main(argc, argv); }
