// Acceptance suite: one pass/fail line per criterion; nonzero exit on any
// failure.  Full tolerances and grid sizes unless --quick is given.

#include <cstring>
#include <iostream>

#include "d2alf/verify.hpp"

int main(int argc, char** argv) {
    bool quick = false;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--quick") == 0) quick = true;
    d2alf::RunConfig cfg;
    bool all = true;
    d2alf::run_acceptance(cfg, quick, [&](const d2alf::CheckResult& r) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  [" << r.detail << "]  ("
                  << r.seconds << " s)\n"
                  << std::flush;
        all = all && r.pass;
    });
    std::cout << (all ? "all criteria passed" : "CRITERIA FAILURES PRESENT") << std::endl;
    return all ? 0 : 1;
}
