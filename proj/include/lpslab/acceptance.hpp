#pragma once

#include <string>
#include <vector>

namespace lpslab {

/** Desk-scale parameters of the acceptance suite; every criterion pins its own tolerances. */
struct AcceptanceConfig {
    int dim = 1;
    int grid_log2 = 12;
    int k_min = 0;
    int k_max = 8;
    int L = 1;
    double delta = 1.0;
    double p = 0.8;
};

/// Consolidated precondition messages; empty when the configuration is runnable.
std::vector<std::string> validate(const AcceptanceConfig& cfg);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;  ///< measured values against their thresholds
    std::string csv;     ///< quantity,value rows
};

/// Runs criteria `only` (all twelve when empty) in order; `progress` receives each result as it finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceConfig& cfg, const std::vector<int>& only = {},
                                            void (*progress)(const CriterionResult&) = nullptr);

/// "PASS [id] name: detail" or "FAIL ...".
std::string format_line(const CriterionResult& r);

} // namespace lpslab
