// Prints one PASS/FAIL line per acceptance criterion; exit status 0 only if
// all thirteen pass. Optional argv[1]: directory for the CSV ledgers.
#include "driver/acceptance.hpp"

int main(int argc, char** argv) {
    return restriction_lab::driver::run_verify(argc > 1 ? argv[1] : "") ? 0 : 1;
}
