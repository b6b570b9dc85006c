#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "curbflow/planner.hpp"
#include "curbflow/pricing.hpp"
#include "curbflow/scenario.hpp"
#include "curbflow/solution.hpp"

namespace curbflow {

/// 12 significant digits, '.' decimal separator, round-trip safe.
std::string format_number(double value);

/// Solution CSV: x,n_a,n_c,S_a,S_c,c_a,c_c,P_a,P_c over the union grid of the
/// provided solutions. A class's columns are empty when its solution is
/// absent; beyond a class's span the row carries the empty-lot values (n = 0).
void write_solution_csv(const std::string& path, const Scenario& scenario,
                        const SpatialSolution* av, const SpatialSolution* hv);

/// Pricing CSV: x,tau_a,tau_c; zero beyond each class's span.
void write_pricing_csv(const std::string& path, const PricingSchedule& schedule);

/// Sweep CSV: theta,k,TC,NP,feasible,reduction.
void write_sweep_csv(const std::string& path, const SweepResult& result);

void write_text_file(const std::string& path, const std::string& content);

/// Provenance record written alongside every output set.
struct RunManifest {
    std::string command;
    std::string scenario_path;
    nlohmann::json parameters;
    std::vector<std::string> outputs;
    double wall_ms = 0.0;

    void write(const std::string& path) const;
};

}  // namespace curbflow
