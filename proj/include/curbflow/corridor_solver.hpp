#pragma once

#include <stdexcept>
#include <string>

#include "curbflow/scenario.hpp"
#include "curbflow/solution.hpp"

namespace curbflow {

struct SolverOptions {
    int grid_steps = 2000;      // RK4 base intervals over the used span
    double mass_rtol = 1e-4;    // relative mass tolerance at convergence
    double span_atol = 1e-6;    // bisection width on the span [km]
    int max_iterations = 200;   // shooting iteration cap
};

class SolverError : public std::runtime_error {
public:
    enum class Kind { NonConvergence, InfeasibleSupply, ModelDomain };

    SolverError(Kind kind, const std::string& what, double max_attainable_mass = 0.0)
        : std::runtime_error(what), kind_(kind), max_attainable_mass_(max_attainable_mass) {}

    Kind kind() const { return kind_; }
    /// Largest demand the supply can absorb (InfeasibleSupply only).
    double max_attainable_mass() const { return max_attainable_mass_; }

private:
    Kind kind_;
    double max_attainable_mass_;
};

/// Solves the class ODE by shooting on the span: backward integration from
/// n(span) = 0, bisection on the span until the trapezoid mass matches N_i.
SpatialSolution solve_llp(const Scenario& scenario, VehicleClass vclass, SolveMode mode,
                          const SolverOptions& opts = {});

inline SpatialSolution solve_equilibrium(const Scenario& s, VehicleClass c,
                                         const SolverOptions& o = {}) {
    return solve_llp(s, c, SolveMode::Equilibrium, o);
}

inline SpatialSolution solve_optimum(const Scenario& s, VehicleClass c,
                                     const SolverOptions& o = {}) {
    return solve_llp(s, c, SolveMode::Optimum, o);
}

/// Analytic span/level/density for the piecewise search model with constant
/// supply: saturated core at occupancy 1-omega plus the branch-ODE tail
/// (linear at optimum, exponential at equilibrium). Treats the steep branch
/// as a hard cap (the Delta -> infinity limit).
SpatialSolution closed_form_llp(const Scenario& scenario, VehicleClass vclass, SolveMode mode);

/// Same solve with beta_a = beta_c = 0, for cruising-bias comparisons.
SpatialSolution no_cruising_solution(const Scenario& scenario, VehicleClass vclass, SolveMode mode,
                                     const SolverOptions& opts = {});

/// Whether the class demand is large enough for the optimum distribution to
/// carry a saturated core at the kink occupancy (N_i >= m_i gamma_i delta
/// (1-omega)^2 / lambda_i). The aggregate-cost formula behind the planner is
/// exact precisely on this domain; below it the linear tail alone holds the
/// demand and the formula overstates the cost.
bool closed_form_core_exists(const Scenario& scenario, VehicleClass vclass);

}  // namespace curbflow
