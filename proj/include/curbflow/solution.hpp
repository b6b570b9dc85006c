#pragma once

#include <vector>

#include "curbflow/scenario.hpp"

namespace curbflow {

enum class SolveMode { Equilibrium, Optimum };

inline const char* mode_tag(SolveMode m) { return m == SolveMode::Equilibrium ? "equilibrium" : "optimum"; }

/// A solved parking distribution for one vehicle class: density samples on a
/// uniform grid over the used span [0, span], plus the class-constant cost
/// level (generalized cost at equilibrium, marginal cost at optimum).
struct SpatialSolution {
    VehicleClass vclass = VehicleClass::HV;
    SolveMode mode = SolveMode::Equilibrium;

    std::vector<double> xs;  // grid, xs.front() == 0, xs.back() == span
    std::vector<double> n;   // density [veh/km] at each grid node

    double span = 0.0;   // furthest used location [km]
    double level = 0.0;  // p_i (equilibrium) or MP_i (optimum)

    struct Diagnostics {
        int shooting_iterations = 0;
        double mass_residual = 0.0;      // |mass - N_i| / N_i
        double flatness_residual = 0.0;  // sup |P or MP - level| / level
        bool interior_zero = false;      // density vanished away from the span
    };
    Diagnostics diag;

    /// Linear interpolation of the density; 0 beyond the span.
    double density_at(double x) const;
    /// Trapezoid mass of the stored grid.
    double mass() const;
};

/// Trapezoid integral of ys over xs (matching lengths, xs ascending).
double trapezoid(const std::vector<double>& xs, const std::vector<double>& ys);

/// cum[i] = integral of ys from xs[0] to xs[i] by the trapezoid rule.
std::vector<double> prefix_integral(const std::vector<double>& xs, const std::vector<double>& ys);

/// suf[i] = integral of ys from xs[i] to xs.back() by the trapezoid rule.
std::vector<double> suffix_integral(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace curbflow
