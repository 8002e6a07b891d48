// Acceptance binary: one line per criterion, nonzero exit if any fails.

#include "acceptance_suite.hpp"

#include <iostream>

int main() {
    hermwave::acceptance::Options opts;
    bool all = true;
    hermwave::acceptance::run_all(opts, {}, [&](const hermwave::acceptance::Outcome& o) {
        std::cout << hermwave::acceptance::format(o) << '\n' << std::flush;
        all = all && o.passed;
    });
    std::cout << (all ? "all acceptance criteria passed" : "some acceptance criteria FAILED") << '\n';
    return all ? 0 : 1;
}
