// Prints one PASS/FAIL line per acceptance criterion; exits non-zero if any
// criterion fails.  Pass criterion numbers to run a subset; -v prints the
// measured values.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "finsler/acceptance.hpp"

int main(int argc, char** argv) {
    namespace fa = finsler::acceptance;
    bool verbose = false;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "-v") == 0) {
            verbose = true;
        } else {
            ids.push_back(std::atoi(argv[i]));
        }
    }
    if (ids.empty()) {
        for (int i = 1; i <= fa::kCriteria; ++i) ids.push_back(i);
    }
    int failed = 0;
    for (int id : ids) {
        const fa::CriterionResult r = fa::run(id);
        std::printf("[%s] %2d %s", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str());
        if (!r.detail.empty()) std::printf(" -- %s", r.detail.c_str());
        std::printf("\n");
        if (verbose || !r.passed) {
            for (const auto& [k, v] : r.measured) std::printf("        %s = %.6g\n", k.c_str(), v);
        }
        std::fflush(stdout);
        failed += !r.passed;
    }
    return failed == 0 ? 0 : 1;
}
