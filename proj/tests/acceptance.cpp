// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include "lpslab/acceptance.hpp"

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    try {
        int failed = 0;
        const auto results = lpslab::run_acceptance(lpslab::AcceptanceConfig{}, only, [](const lpslab::CriterionResult& r) {
            std::printf("%s\n", lpslab::format_line(r).c_str());
            std::fflush(stdout);
        });
        for (const auto& r : results) failed += !r.pass;
        std::printf("%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
        return failed == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance: %s\n", e.what());
        return 2;
    }
}
