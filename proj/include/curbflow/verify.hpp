#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "curbflow/scenario.hpp"

namespace curbflow {

struct CheckResult {
    std::string name;
    double computed = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    bool is_note = false;  // informational line, never fails the run
    std::string detail;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

/// Cross-checks the numeric solvers against the brute-force oracle, the
/// closed forms against the numeric routes, and the structural invariants of
/// the solutions. Checks that do not apply to the scenario's configuration
/// (search model, supply kind, planning block) are skipped.
VerificationReport run_verification(const Scenario& scenario, int bins = 2000);

}  // namespace curbflow
