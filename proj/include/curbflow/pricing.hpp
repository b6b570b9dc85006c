#pragma once

#include <vector>

#include "curbflow/corridor_solver.hpp"
#include "curbflow/scenario.hpp"
#include "curbflow/solution.hpp"

namespace curbflow {

/// Optimal differentiated location prices over the optimum solutions' used
/// spans, plus the aggregate cost decomposition.
struct PricingSchedule {
    std::vector<double> xs;     // union of both solution grids
    std::vector<double> tau_a;  // 0 beyond the AV span
    std::vector<double> tau_c;  // 0 beyond the HV span
    double span_av = 0.0, span_hv = 0.0;
    double tp_min = 0.0;       // total parking cost at the optimum distribution
    double tc = 0.0;           // total cost including pricing
    double net_revenue = 0.0;  // tc - tp_min
};

/// tau_a = beta_a * integral_x^span(n_a) + gamma_a n_a dS_a/dn_a;
/// tau_c = -beta_c * integral_x^span(n_c) + gamma_c n_c dS_c/dn_c.
/// Both solutions must be optimum-mode.
PricingSchedule optimal_prices(const Scenario& scenario, const SpatialSolution& av_opt,
                               const SpatialSolution& hv_opt);

/// TC = MP_a N_a + MP_c N_c + TCr.
double priced_total_cost(const Scenario& scenario, const SpatialSolution& av_opt,
                         const SpatialSolution& hv_opt);

struct PricingComparison {
    double tp_equilibrium = 0.0;  // integral of P_i n_i at the unpriced equilibrium
    double tp_min = 0.0;          // the same integral at the optimum distribution
    double reduction = 0.0;       // (tp_equilibrium - tp_min) / tp_equilibrium
};

/// Solves both modes for both classes and compares total parking cost
/// (pricing transfers excluded from both sides).
PricingComparison unpriced_vs_priced_reduction(const Scenario& scenario,
                                               const SolverOptions& opts = {});

}  // namespace curbflow
