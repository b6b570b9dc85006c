#pragma once

#include <vector>

#include "curbflow/scenario.hpp"
#include "curbflow/solution.hpp"

namespace curbflow {

/// Generalized parking cost split into its three components.
struct CostBreakdown {
    VehicleClass vclass = VehicleClass::HV;
    double access = 0.0;  // lambda_i * x (walk or self-drive)
    double search = 0.0;  // gamma_i * S_i
    double cruise = 0.0;  // c_i
    double total = 0.0;
};

/// Average cruising cost c_i(x) for a parker of the solution's class.
/// HVs pay for inward cruisers beyond x; AVs pay for all HV cruisers plus
/// outward AV cruisers up to x. Throws std::out_of_range outside [0, span].
double cruising_cost(const Scenario& scenario, const SpatialSolution& solution, double x);

/// c_i at every grid node of the solution, by prefix/suffix trapezoid sums.
std::vector<double> cruising_profile(const Scenario& scenario, const SpatialSolution& solution);

/// P_i(x) = lambda_i x + gamma_i S_i + c_i(x).
CostBreakdown generalized_cost(const Scenario& scenario, const SpatialSolution& solution, double x);

/// MP_i(x) = lambda_i x + gamma_i (S_i + n_i dS_i/dn_i); excludes cruising.
double marginal_cost(const Scenario& scenario, const SpatialSolution& solution, double x);

/// Total cruising cost TCr = 0.5 (beta_c (1 - eps^2) + beta_a eps^2) N^2,
/// independent of the parking distribution.
double total_cruising_cost(const Scenario& scenario);

/// HV share 0.5 beta_c (1-eps)^2 N^2.
double hv_cruising_total(const Scenario& scenario);

/// AV share beta_c (1-eps) eps N^2 + 0.5 beta_a eps^2 N^2.
double av_cruising_total(const Scenario& scenario);

/// Planning-invariant part of the total parking cost under the piecewise
/// search model: C(eps) = (gamma_c (1-eps) + gamma_a eps) delta (1-omega) N + TCr.
double planning_constant(const Scenario& scenario);

/// TP_i = integral of (P_i - c_i) n_i dx over the solution grid.
double total_parking_cost_excl_cruising(const Scenario& scenario, const SpatialSolution& solution);

/// Integral of P_i n_i dx over the solution grid (cruising included).
double total_parking_cost(const Scenario& scenario, const SpatialSolution& solution);

}  // namespace curbflow
