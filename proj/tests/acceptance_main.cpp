// Acceptance suite runner: one pass/fail line per criterion, exit 0 when all
// criteria hold at their pinned tolerances.

#include "prodgeo/acceptance.hpp"

#include <cstdio>

int main() {
    using namespace prodgeo;
    std::vector<CriterionResult> results;
    try {
        results = run_acceptance();
    } catch (const Error& e) {
        std::fprintf(stderr, "acceptance suite aborted: %s\n", e.what());
        return 2;
    }
    int failed = 0;
    for (const auto& r : results) {
        std::printf("[%s] %02d %-34s worst=%-12s tol=%s%s%s\n", r.pass ? "PASS" : "FAIL", r.index,
                    r.name.c_str(), format_double(r.worst).c_str(), format_double(r.tolerance).c_str(),
                    r.detail.empty() ? "" : "  ", r.detail.c_str());
        if (!r.pass) ++failed;
    }
    std::printf("%zu/%zu criteria passed\n", results.size() - failed, results.size());
    return failed == 0 ? 0 : 1;
}
