#include "curbflow/corridor_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "curbflow/cost_model.hpp"
#include "curbflow/search_time.hpp"

namespace curbflow {

namespace {

constexpr double kPoleHeadroom = 1e-9;  // binomial occupancy guard: n <= m (1 - 1e-9)

struct ClassParams {
    double N, lambda, beta, gamma;
};

ClassParams class_params(const Scenario& s, VehicleClass c) {
    return {s.demand(c), s.lambda(c), s.beta(c), s.gamma(c)};
}

double eval_cap(const SearchModel& model, double m) {
    return model.kind == SearchModel::Kind::Binomial ? m * (1.0 - kPoleHeadroom) : m;
}

/// dn/ds for the backward integration variable s = span - x.
double backward_rhs(const Scenario& sc, VehicleClass vclass, SolveMode mode,
                    const ClassParams& p, double x, double n) {
    const double m = sc.spaces(vclass, x);
    const double mp = sc.spaces_prime(vclass, x);
    if (!(m > 0.0)) return 0.0;
    const double ne = std::clamp(n, 0.0, eval_cap(sc.search, m));
    const SearchPartials d = search_partials(sc.search, ne, m);
    double nprime_x;
    if (mode == SolveMode::Equilibrium) {
        const double rhs =
            vclass == VehicleClass::AV ? -(p.lambda + p.beta * ne) : -(p.lambda - p.beta * ne);
        nprime_x = (rhs / p.gamma - d.dm * mp) / d.dn;
    } else {
        const double denom = 2.0 * d.dn + ne * d.dnn;
        if (!(denom > 0.0))
            throw SolverError(SolverError::Kind::ModelDomain,
                              "degenerate search model: marginal cost has no slope in n");
        nprime_x = -(p.lambda / p.gamma + (d.dm + ne * d.dnm) * mp) / denom;
    }
    return -nprime_x;
}

int substeps_for(const SearchModel& model, double n, double m) {
    if (model.kind != SearchModel::Kind::Binomial || !(m > 0.0)) return 1;
    const double headroom = 1.0 - n / m;
    if (headroom < 1e-6) return 16;
    if (headroom < 1e-5) return 8;
    if (headroom < 1e-4) return 4;
    if (headroom < 1e-3) return 2;
    return 1;
}

struct Trajectory {
    std::vector<double> xs, n;
    bool interior_zero = false;
    double mass = 0.0;
};

/// Integrates the density backward from n(span) = 0 on a uniform grid.
///
/// Piecewise optimum: once the density reaches the kink occupancy 1-omega it
/// is held there (n = m(x)(1-omega)). Crossing into the steep branch would
/// make the marginal cost jump by gamma (1-omega)(Delta - delta), so no
/// equal-marginal-cost trajectory continues through the kink; the pinned core
/// is the stationarity continuation for the nonsmooth model.
///
/// Piecewise equilibrium: the generalized cost is continuous across the kink
/// and the trajectory genuinely enters the steep branch. The density slope
/// jumps by the factor Delta/delta there, so the crossing is located by
/// bisection and the step lands on the kink exactly before switching branch.
Trajectory integrate(const Scenario& sc, VehicleClass vclass, SolveMode mode,
                     const ClassParams& p, double span, int steps) {
    Trajectory t;
    t.xs.resize(steps + 1);
    t.n.assign(steps + 1, 0.0);
    for (int j = 0; j <= steps; ++j) t.xs[j] = span * static_cast<double>(j) / steps;
    const double h = span / steps;

    const bool piecewise = sc.search.kind == SearchModel::Kind::PiecewiseLinear;
    const bool pin_at_kink = mode == SolveMode::Optimum && piecewise;
    const double knee = 1.0 - sc.search.omega;

    auto rk4_step = [&](double x0, double n0, double hs) {
        const double k1 = backward_rhs(sc, vclass, mode, p, x0, n0);
        const double k2 = backward_rhs(sc, vclass, mode, p, x0 - 0.5 * hs, n0 + 0.5 * hs * k1);
        const double k3 = backward_rhs(sc, vclass, mode, p, x0 - 0.5 * hs, n0 + 0.5 * hs * k2);
        const double k4 = backward_rhs(sc, vclass, mode, p, x0 - hs, n0 + hs * k3);
        return n0 + hs / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
    };

    double state = 0.0;
    bool pinned = false;
    for (int j = steps; j >= 1; --j) {
        const double x_target = t.xs[j - 1];
        double x_cur = t.xs[j];
        int guard = 0;
        while (!pinned && x_cur > x_target + 1e-14 * std::max(span, 1.0) && ++guard < 4096) {
            const double m_here = sc.spaces(vclass, x_cur);
            const int parts = substeps_for(sc.search, state, m_here);
            const double hs = std::min(x_cur - x_target, h / parts);
            double next = rk4_step(x_cur, state, hs);
            const double x_next = x_cur - hs;
            if (pin_at_kink && next >= sc.spaces(vclass, std::max(0.0, x_next)) * knee) {
                pinned = true;
                break;
            }
            if (piecewise && mode == SolveMode::Equilibrium) {
                const double g0 = state - knee * m_here;
                const double g1 = next - knee * sc.spaces(vclass, std::max(0.0, x_next));
                if (g0 * g1 < 0.0 && std::abs(g0) > 1e-7 * m_here) {
                    double flo = 0.0, fhi = 1.0;
                    for (int b = 0; b < 50; ++b) {
                        const double fm = 0.5 * (flo + fhi);
                        const double nm = rk4_step(x_cur, state, fm * hs);
                        const double gm =
                            nm - knee * sc.spaces(vclass, std::max(0.0, x_cur - fm * hs));
                        if ((g0 < 0.0) == (gm < 0.0)) flo = fm;
                        else fhi = fm;
                    }
                    const double f = 0.5 * (flo + fhi);
                    x_cur -= f * hs;
                    const double m_mid = sc.spaces(vclass, std::max(0.0, x_cur));
                    state = (knee + (g0 < 0.0 ? 1e-9 : -1e-9)) * m_mid;
                    continue;
                }
            }
            state = std::clamp(next, 0.0, eval_cap(sc.search, sc.spaces(vclass, std::max(0.0, x_next))));
            x_cur = x_next;
        }
        if (pinned) {
            t.n[j - 1] = sc.spaces(vclass, x_target) * knee;
            continue;
        }
        if (state <= 0.0 && j - 1 > 0) t.interior_zero = true;
        t.n[j - 1] = state;
    }
    t.mass = trapezoid(t.xs, t.n);
    return t;
}

SpatialSolution trivial_solution(const Scenario& sc, VehicleClass vclass, SolveMode mode) {
    SpatialSolution sol;
    sol.vclass = vclass;
    sol.mode = mode;
    sol.xs = {0.0};
    sol.n = {0.0};
    sol.span = 0.0;
    sol.level = sc.gamma(vclass) * sc.search.s_min();
    if (mode == SolveMode::Equilibrium && vclass == VehicleClass::AV)
        sol.level += sc.beta_c * sc.demand_hv() + sc.beta_a * sc.demand_av();
    return sol;
}

/// Cost metric at one grid node: P_i at equilibrium, MP_i at optimum. The
/// optimum metric is an interval at the piecewise kink occupancy, where both
/// branch slopes of S are admissible marginal rates.
void metric_interval(const Scenario& sc, const SpatialSolution& sol, std::size_t i,
                     const std::vector<double>& cruise, double& lo, double& hi) {
    const double x = sol.xs[i];
    const double m = sc.spaces(sol.vclass, x);
    const double lambda = sc.lambda(sol.vclass);
    const double gamma = sc.gamma(sol.vclass);
    const double ne = std::clamp(sol.n[i], 0.0, eval_cap(sc.search, m));
    const double s = search_time(sc.search, ne, m);
    if (sol.mode == SolveMode::Equilibrium) {
        lo = hi = lambda * x + gamma * s + cruise[i];
        return;
    }
    if (sc.search.kind == SearchModel::Kind::PiecewiseLinear) {
        const double knee = 1.0 - sc.search.omega;
        if (std::abs(ne / m - knee) <= 1e-9) {
            lo = lambda * x + gamma * (s + ne * sc.search.delta / m);
            hi = lambda * x + gamma * (s + ne * sc.search.Delta / m);
            return;
        }
    }
    const double sn = search_partials(sc.search, ne, m).dn;
    lo = hi = lambda * x + gamma * (s + ne * sn);
}

/// Derives the level from the 10 outermost nodes (least occupancy-sensitive)
/// and the sup-norm flatness residual over the whole span.
void finalize(const Scenario& sc, SpatialSolution& sol) {
    const std::vector<double> cruise = cruising_profile(sc, sol);
    const std::size_t count = sol.xs.size();
    const std::size_t tail = std::min<std::size_t>(10, count);
    double level = 0.0;
    for (std::size_t i = count - tail; i < count; ++i) {
        double lo, hi;
        metric_interval(sc, sol, i, cruise, lo, hi);
        level += 0.5 * (lo + hi);
    }
    sol.level = level / static_cast<double>(tail);

    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        double lo, hi;
        metric_interval(sc, sol, i, cruise, lo, hi);
        double dist = 0.0;
        if (sol.level < lo) dist = lo - sol.level;
        else if (sol.level > hi) dist = sol.level - hi;
        worst = std::max(worst, dist);
    }
    sol.diag.flatness_residual = sol.level != 0.0 ? worst / std::abs(sol.level) : worst;
}

/// Bisection for the coreless (small demand) closed-form spans.
double invert_monotone(double target, double lo, double hi,
                       const std::function<double(double)>& f) {
    for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

SpatialSolution solve_llp(const Scenario& sc, VehicleClass vclass, SolveMode mode,
                          const SolverOptions& opts) {
    const ClassParams p = class_params(sc, vclass);
    if (p.N <= 0.0) return trivial_solution(sc, vclass, mode);

    const double x_hat = sc.supply.x_hat;
    int iterations = 0;
    auto mass_at = [&](double span) {
        ++iterations;
        return integrate(sc, vclass, mode, p, span, opts.grid_steps).mass;
    };

    // Expanding bracket, then bisection. Mass grows with the span for
    // constant supply; for general profiles the expansion scan still lands
    // on a bracketing pair.
    double lo = 0.0;
    double hi = x_hat / 128.0;
    double mass_hi = mass_at(hi);
    while (mass_hi < p.N && hi < x_hat && iterations < opts.max_iterations) {
        lo = hi;
        hi = std::min(x_hat, hi * 2.0);
        mass_hi = mass_at(hi);
    }
    if (mass_hi < p.N) {
        if (hi >= x_hat)
            throw SolverError(SolverError::Kind::InfeasibleSupply,
                              "demand exceeds what the supply span can absorb", mass_hi);
        throw SolverError(SolverError::Kind::NonConvergence,
                          "shooting bracket expansion exceeded the iteration cap");
    }

    while (hi - lo > opts.span_atol && iterations < opts.max_iterations) {
        const double mid = 0.5 * (lo + hi);
        if (mass_at(mid) < p.N) lo = mid;
        else hi = mid;
    }
    if (hi - lo > opts.span_atol)
        throw SolverError(SolverError::Kind::NonConvergence,
                          "span bisection exceeded the iteration cap");

    const double span = 0.5 * (lo + hi);
    Trajectory t = integrate(sc, vclass, mode, p, span, opts.grid_steps);

    SpatialSolution sol;
    sol.vclass = vclass;
    sol.mode = mode;
    sol.xs = std::move(t.xs);
    sol.n = std::move(t.n);
    sol.span = span;
    sol.diag.shooting_iterations = iterations;
    sol.diag.interior_zero = t.interior_zero;
    sol.diag.mass_residual = std::abs(t.mass - p.N) / p.N;
    if (sol.diag.mass_residual > opts.mass_rtol)
        throw SolverError(SolverError::Kind::NonConvergence,
                          "converged span does not reproduce the class demand");
    finalize(sc, sol);
    return sol;
}

SpatialSolution no_cruising_solution(const Scenario& scenario, VehicleClass vclass, SolveMode mode,
                                     const SolverOptions& opts) {
    Scenario stripped = scenario;
    stripped.beta_a = 0.0;
    stripped.beta_c = 0.0;
    return solve_llp(stripped, vclass, mode, opts);
}

bool closed_form_core_exists(const Scenario& scenario, VehicleClass vclass) {
    if (scenario.search.kind != SearchModel::Kind::PiecewiseLinear) return false;
    if (scenario.supply.kind != SupplyProfile::Kind::Constant) return false;
    const double m = scenario.spaces(vclass, 0.0);
    const double omega = scenario.search.omega;
    const double tail_mass = m * scenario.gamma(vclass) * scenario.search.delta *
                             (1.0 - omega) * (1.0 - omega) / scenario.lambda(vclass);
    return scenario.demand(vclass) >= tail_mass;
}

SpatialSolution closed_form_llp(const Scenario& sc, VehicleClass vclass, SolveMode mode) {
    if (sc.search.kind != SearchModel::Kind::PiecewiseLinear)
        throw std::invalid_argument("closed_form_llp requires the piecewise search model");
    if (sc.supply.kind != SupplyProfile::Kind::Constant)
        throw std::invalid_argument("closed_form_llp requires a constant supply profile");

    const ClassParams p = class_params(sc, vclass);
    if (p.N <= 0.0) return trivial_solution(sc, vclass, mode);

    const double m = sc.spaces(vclass, 0.0);
    const double delta = sc.search.delta;
    const double omega = sc.search.omega;
    const double gamma = p.gamma;
    const double lambda = p.lambda;
    const double knee_density = m * (1.0 - omega);

    double span = 0.0;
    double tail_len = 0.0;  // distance over which the density falls from the kink to zero
    std::function<double(double)> tail;  // density at s = span - x within the tail

    if (mode == SolveMode::Optimum) {
        tail_len = 2.0 * gamma * delta * (1.0 - omega) / lambda;
        const double tail_mass = m * gamma * delta * (1.0 - omega) * (1.0 - omega) / lambda;
        if (p.N >= tail_mass) {
            span = p.N / knee_density + gamma * delta * (1.0 - omega) / lambda;
        } else {
            span = 2.0 * std::sqrt(gamma * delta * p.N / (lambda * m));
            tail_len = span;
        }
        tail = [=](double s) { return lambda * m * s / (2.0 * gamma * delta); };
    } else {
        const double a = m * p.beta / (gamma * delta);
        const double q = m * p.beta * (1.0 - omega) / lambda;  // relative cruising strength
        if (vclass == VehicleClass::HV && q >= 1.0)
            throw SolverError(SolverError::Kind::ModelDomain,
                              "lambda_c <= m_c beta_c (1-omega): HV closed form undefined");
        if (q < 1e-10) {
            // Cruising-free limit: linear tail with slope lambda m / (gamma delta).
            tail_len = gamma * delta * (1.0 - omega) / lambda;
            const double tail_mass =
                0.5 * m * gamma * delta * (1.0 - omega) * (1.0 - omega) / lambda;
            if (p.N >= tail_mass) {
                span = p.N / knee_density + 0.5 * gamma * delta * (1.0 - omega) / lambda;
            } else {
                span = std::sqrt(2.0 * gamma * delta * p.N / (lambda * m));
                tail_len = span;
            }
            tail = [=](double s) { return lambda * m * s / (gamma * delta); };
        } else if (vclass == VehicleClass::AV) {
            tail_len = std::log1p(q) / a;
            const double tail_mass =
                gamma * delta * (1.0 - omega) / p.beta - lambda / p.beta * tail_len;
            if (p.N >= tail_mass) {
                span = p.N / knee_density - gamma * delta / (m * p.beta) -
                       gamma * delta * (lambda + m * p.beta * (1.0 - omega)) /
                           (m * m * p.beta * p.beta * (1.0 - omega)) *
                           std::log(lambda / (lambda + m * p.beta * (1.0 - omega)));
            } else {
                const double aa = a;
                auto mass_of = [=, beta = p.beta](double xbar) {
                    return lambda / beta * ((std::exp(aa * xbar) - 1.0) / aa - xbar);
                };
                span = invert_monotone(p.N, 0.0, tail_len, mass_of);
                tail_len = span;
            }
            tail = [=, beta = p.beta](double s) { return lambda / beta * std::expm1(a * s); };
        } else {
            tail_len = std::log(lambda / (lambda - m * p.beta * (1.0 - omega))) / a;
            const double tail_mass =
                lambda / p.beta * tail_len - gamma * delta * (1.0 - omega) / p.beta;
            if (p.N >= tail_mass) {
                span = p.N / knee_density + gamma * delta / (m * p.beta) -
                       gamma * delta * (lambda - m * p.beta * (1.0 - omega)) /
                           (m * m * p.beta * p.beta * (1.0 - omega)) *
                           std::log(lambda / (lambda - m * p.beta * (1.0 - omega)));
            } else {
                const double aa = a;
                auto mass_of = [=, beta = p.beta](double xbar) {
                    return lambda / beta * (xbar - (1.0 - std::exp(-aa * xbar)) / aa);
                };
                span = invert_monotone(p.N, 0.0, tail_len, mass_of);
                tail_len = span;
            }
            tail = [=, beta = p.beta](double s) { return -lambda / beta * std::expm1(-a * s); };
        }
    }

    SpatialSolution sol;
    sol.vclass = vclass;
    sol.mode = mode;
    sol.span = span;
    const int steps = 2000;
    sol.xs.resize(steps + 1);
    sol.n.resize(steps + 1);
    for (int j = 0; j <= steps; ++j) {
        const double x = span * static_cast<double>(j) / steps;
        sol.xs[j] = x;
        const double s = span - x;
        sol.n[j] = s > tail_len ? knee_density : std::min(knee_density, tail(s));
    }
    sol.n.back() = 0.0;
    sol.diag.mass_residual = std::abs(sol.mass() - p.N) / p.N;
    finalize(sc, sol);

    // The analytic level is authoritative; the grid-derived one only differs
    // by quadrature rounding in the cruising term.
    if (mode == SolveMode::Optimum || vclass == VehicleClass::HV) {
        sol.level = lambda * span;
    } else {
        sol.level = sc.beta_c * sc.demand_hv() + sc.beta_a * sc.demand_av() + lambda * span;
    }
    return sol;
}

}  // namespace curbflow
