#include "curbflow/cost_model.hpp"

#include <cmath>
#include <stdexcept>

#include "curbflow/search_time.hpp"

namespace curbflow {

namespace {

void check_span(const SpatialSolution& solution, double x) {
    if (x < 0.0 || x > solution.span + 1e-12)
        throw std::out_of_range("location outside the solution's used span");
}

/// Integral of n over [0, x] on the solution grid (linear density between nodes).
double partial_mass(const SpatialSolution& s, double x) {
    double sum = 0.0;
    for (std::size_t i = 1; i < s.xs.size(); ++i) {
        if (s.xs[i] <= x) {
            sum += 0.5 * (s.n[i] + s.n[i - 1]) * (s.xs[i] - s.xs[i - 1]);
        } else {
            const double nx = s.density_at(x);
            sum += 0.5 * (s.n[i - 1] + nx) * (x - s.xs[i - 1]);
            break;
        }
    }
    return sum;
}

}  // namespace

double cruising_cost(const Scenario& scenario, const SpatialSolution& solution, double x) {
    check_span(solution, x);
    if (solution.vclass == VehicleClass::HV) {
        const double behind = solution.mass() - partial_mass(solution, x);
        return scenario.beta_c * behind;
    }
    return scenario.beta_c * scenario.demand_hv() + scenario.beta_a * partial_mass(solution, x);
}

std::vector<double> cruising_profile(const Scenario& scenario, const SpatialSolution& solution) {
    std::vector<double> c(solution.xs.size(), 0.0);
    if (solution.vclass == VehicleClass::HV) {
        const std::vector<double> suf = suffix_integral(solution.xs, solution.n);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = scenario.beta_c * suf[i];
    } else {
        const std::vector<double> pre = prefix_integral(solution.xs, solution.n);
        const double base = scenario.beta_c * scenario.demand_hv();
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = base + scenario.beta_a * pre[i];
    }
    return c;
}

CostBreakdown generalized_cost(const Scenario& scenario, const SpatialSolution& solution, double x) {
    check_span(solution, x);
    CostBreakdown out;
    out.vclass = solution.vclass;
    out.access = scenario.lambda(solution.vclass) * x;
    const double m = scenario.spaces(solution.vclass, x);
    out.search = scenario.gamma(solution.vclass) *
                 search_time(scenario.search, solution.density_at(x), m);
    out.cruise = cruising_cost(scenario, solution, x);
    out.total = out.access + out.search + out.cruise;
    return out;
}

double marginal_cost(const Scenario& scenario, const SpatialSolution& solution, double x) {
    check_span(solution, x);
    const double n = solution.density_at(x);
    const double m = scenario.spaces(solution.vclass, x);
    const double s = search_time(scenario.search, n, m);
    const double sn = search_partials(scenario.search, n, m).dn;
    return scenario.lambda(solution.vclass) * x +
           scenario.gamma(solution.vclass) * (s + n * sn);
}

double hv_cruising_total(const Scenario& s) {
    const double nc = s.demand_hv();
    return 0.5 * s.beta_c * nc * nc;
}

double av_cruising_total(const Scenario& s) {
    const double na = s.demand_av();
    return s.beta_c * s.demand_hv() * na + 0.5 * s.beta_a * na * na;
}

double total_cruising_cost(const Scenario& s) {
    const double e = s.epsilon;
    return 0.5 * (s.beta_c * (1.0 - e * e) + s.beta_a * e * e) * s.N * s.N;
}

double planning_constant(const Scenario& s) {
    if (s.search.kind != SearchModel::Kind::PiecewiseLinear)
        throw std::invalid_argument("planning_constant requires the piecewise search model");
    const double e = s.epsilon;
    const double search_term =
        (s.gamma_c * (1.0 - e) + s.gamma_a * e) * s.search.delta * (1.0 - s.search.omega) * s.N;
    return search_term + total_cruising_cost(s);
}

double total_parking_cost_excl_cruising(const Scenario& scenario, const SpatialSolution& s) {
    std::vector<double> integrand(s.xs.size(), 0.0);
    const double lambda = scenario.lambda(s.vclass);
    const double gamma = scenario.gamma(s.vclass);
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        const double m = scenario.spaces(s.vclass, s.xs[i]);
        integrand[i] = (lambda * s.xs[i] + gamma * search_time(scenario.search, s.n[i], m)) * s.n[i];
    }
    return trapezoid(s.xs, integrand);
}

double total_parking_cost(const Scenario& scenario, const SpatialSolution& s) {
    const std::vector<double> c = cruising_profile(scenario, s);
    std::vector<double> integrand(s.xs.size(), 0.0);
    const double lambda = scenario.lambda(s.vclass);
    const double gamma = scenario.gamma(s.vclass);
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
        const double m = scenario.spaces(s.vclass, s.xs[i]);
        integrand[i] =
            (lambda * s.xs[i] + gamma * search_time(scenario.search, s.n[i], m) + c[i]) * s.n[i];
    }
    return trapezoid(s.xs, integrand);
}

}  // namespace curbflow
