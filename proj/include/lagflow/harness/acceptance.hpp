#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lagflow/harness/studies.hpp"

namespace lagflow::harness {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    /// When nonempty, every run's artifacts and report.json go below this directory.
    std::string output_dir;
    /// Criteria to run (1..10); empty means all. 2-4 audit whatever runs of 1 and 5-8 were made.
    std::vector<int> only;
    /// Called as each criterion finishes, in completion order.
    std::function<void(const CriterionResult&)> progress;
};

struct AcceptanceReport {
    /// Sorted by id.
    std::vector<CriterionResult> results;
    bool all_passed() const;
};

AcceptanceReport run_acceptance(const AcceptanceOptions& options = {});

/// "PASS  3  jacobian positivity: ..." style line.
std::string format_result(const CriterionResult& r);

nlohmann::json to_json(const AcceptanceReport& report);

}  // namespace lagflow::harness
