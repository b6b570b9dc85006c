#include "curbflow/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curbflow/cost_model.hpp"
#include "curbflow/search_time.hpp"

namespace curbflow {

namespace {

/// Linear interpolation of tabulated values over the solution grid.
double interp(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.empty()) return 0.0;
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const std::size_t lo = hi - 1;
    const double dx = xs[hi] - xs[lo];
    if (dx <= 0.0) return ys[lo];
    return ys[lo] + (x - xs[lo]) / dx * (ys[hi] - ys[lo]);
}

double price_at(const Scenario& sc, const SpatialSolution& sol,
                const std::vector<double>& suffix_mass, double x) {
    if (x > sol.span) return 0.0;
    const double n = sol.density_at(x);
    const double m = sc.spaces(sol.vclass, x);
    const double remaining = interp(sol.xs, suffix_mass, x);
    const double sn = n > 0.0 ? search_partials(sc.search, n, m).dn
                              : search_partials(sc.search, 0.0, m).dn;
    const double beta = sc.beta(sol.vclass);
    const double gamma = sc.gamma(sol.vclass);
    const double cruise_part =
        sol.vclass == VehicleClass::AV ? beta * remaining : -beta * remaining;
    return cruise_part + gamma * n * sn;
}

}  // namespace

PricingSchedule optimal_prices(const Scenario& scenario, const SpatialSolution& av_opt,
                               const SpatialSolution& hv_opt) {
    if (av_opt.mode != SolveMode::Optimum || hv_opt.mode != SolveMode::Optimum)
        throw std::invalid_argument("optimal_prices requires optimum-mode solutions");
    if (av_opt.vclass != VehicleClass::AV || hv_opt.vclass != VehicleClass::HV)
        throw std::invalid_argument("optimal_prices expects (AV, HV) solutions in that order");

    PricingSchedule ps;
    ps.span_av = av_opt.span;
    ps.span_hv = hv_opt.span;

    ps.xs.reserve(av_opt.xs.size() + hv_opt.xs.size());
    ps.xs.insert(ps.xs.end(), av_opt.xs.begin(), av_opt.xs.end());
    ps.xs.insert(ps.xs.end(), hv_opt.xs.begin(), hv_opt.xs.end());
    std::sort(ps.xs.begin(), ps.xs.end());
    ps.xs.erase(std::unique(ps.xs.begin(), ps.xs.end()), ps.xs.end());

    const std::vector<double> suf_a = suffix_integral(av_opt.xs, av_opt.n);
    const std::vector<double> suf_c = suffix_integral(hv_opt.xs, hv_opt.n);

    ps.tau_a.resize(ps.xs.size());
    ps.tau_c.resize(ps.xs.size());
    for (std::size_t i = 0; i < ps.xs.size(); ++i) {
        ps.tau_a[i] = price_at(scenario, av_opt, suf_a, ps.xs[i]);
        ps.tau_c[i] = price_at(scenario, hv_opt, suf_c, ps.xs[i]);
    }

    ps.tp_min = total_parking_cost(scenario, av_opt) + total_parking_cost(scenario, hv_opt);
    ps.tc = priced_total_cost(scenario, av_opt, hv_opt);
    ps.net_revenue = ps.tc - ps.tp_min;
    return ps;
}

double priced_total_cost(const Scenario& scenario, const SpatialSolution& av_opt,
                         const SpatialSolution& hv_opt) {
    if (av_opt.mode != SolveMode::Optimum || hv_opt.mode != SolveMode::Optimum)
        throw std::invalid_argument("priced_total_cost requires optimum-mode solutions");
    return av_opt.level * scenario.demand_av() + hv_opt.level * scenario.demand_hv() +
           total_cruising_cost(scenario);
}

PricingComparison unpriced_vs_priced_reduction(const Scenario& scenario,
                                               const SolverOptions& opts) {
    PricingComparison out;
    const SpatialSolution eq_a = solve_llp(scenario, VehicleClass::AV, SolveMode::Equilibrium, opts);
    const SpatialSolution eq_c = solve_llp(scenario, VehicleClass::HV, SolveMode::Equilibrium, opts);
    const SpatialSolution op_a = solve_llp(scenario, VehicleClass::AV, SolveMode::Optimum, opts);
    const SpatialSolution op_c = solve_llp(scenario, VehicleClass::HV, SolveMode::Optimum, opts);
    out.tp_equilibrium = total_parking_cost(scenario, eq_a) + total_parking_cost(scenario, eq_c);
    out.tp_min = total_parking_cost(scenario, op_a) + total_parking_cost(scenario, op_c);
    out.reduction =
        out.tp_equilibrium != 0.0 ? (out.tp_equilibrium - out.tp_min) / out.tp_equilibrium : 0.0;
    return out;
}

}  // namespace curbflow
