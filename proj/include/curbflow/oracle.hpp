#pragma once

#include <cstddef>
#include <vector>

#include "curbflow/scenario.hpp"
#include "curbflow/solution.hpp"

namespace curbflow {

/// A brute-force parking distribution over uniform bins, found without the
/// ODE machinery: convex minimization for the optimum, cost-level inversion
/// for the equilibrium.
struct BinnedSolution {
    VehicleClass vclass = VehicleClass::HV;
    SolveMode mode = SolveMode::Optimum;

    std::vector<double> centers;  // bin midpoints over [0, x_max]
    std::vector<double> n;        // densities, one per bin
    double h = 0.0;               // bin width

    double objective = 0.0;   // sum (lambda x_j + gamma S_j) n_j h
    double level = 0.0;       // common marginal cost / equilibrium cost
    double kkt_spread = 0.0;  // optimum: stationarity residual over active bins
    double mass = 0.0;
    int iterations = 0;
    bool converged = false;

    /// Furthest bin centre carrying more than 1e-6 veh/km.
    double support_span() const;
};

/// Projected-gradient minimization of the class parking cost over
/// {0 <= n <= m, sum n h = N}, in occupancy variables with Dykstra-style
/// alternation between the box and the mass hyperplane. Convexity of the
/// objective makes the converged point the global optimum. `objective_trace`
/// (optional) receives the accepted objective value per iteration.
BinnedSolution binned_optimum(const Scenario& scenario, VehicleClass vclass, int bins,
                              double x_max, std::vector<double>* objective_trace = nullptr);

/// Equilibrium by bisection on the common cost level; the cruising field is
/// resolved to a fixed point (damped) inside each level trial. `cruise_seed`
/// scales the initial cruising guess and only affects the iteration path.
BinnedSolution binned_equilibrium(const Scenario& scenario, VehicleClass vclass, int bins,
                                  double x_max, double cruise_seed = 0.0);

struct MarginalCheck {
    double finite_difference = 0.0;
    double analytic = 0.0;
    double rel_error = 0.0;
    bool at_bound = false;       // one-sided difference substituted
    bool straddles_kink = false; // piecewise: perturbation crosses the kink
};

/// Central finite difference of the binned total cost against the analytic
/// marginal cost at bin j.
MarginalCheck finite_difference_marginal(const Scenario& scenario, const BinnedSolution& sol,
                                         std::size_t j);

}  // namespace curbflow
