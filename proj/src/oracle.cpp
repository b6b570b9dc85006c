#include "curbflow/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curbflow/corridor_solver.hpp"
#include "curbflow/search_time.hpp"

namespace curbflow {

namespace {

constexpr double kPoleHeadroom = 1e-9;

struct Bins {
    std::vector<double> centers;  // midpoints
    std::vector<double> m;        // capacity per bin
    std::vector<double> cap;      // density upper bound per bin
    double h = 0.0;
};

Bins make_bins(const Scenario& sc, VehicleClass vclass, int bins, double x_max) {
    // Accuracy guarantees assume >= 100 bins; coarser grids still run so the
    // verification report can demonstrate the discretization error.
    if (bins < 10) throw std::invalid_argument("oracle needs at least 10 bins");
    if (!(x_max > 0.0)) throw std::invalid_argument("oracle needs a positive domain");
    Bins b;
    b.h = x_max / bins;
    b.centers.resize(bins);
    b.m.resize(bins);
    b.cap.resize(bins);
    const bool binomial = sc.search.kind == SearchModel::Kind::Binomial;
    for (int j = 0; j < bins; ++j) {
        b.centers[j] = (j + 0.5) * b.h;
        b.m[j] = sc.spaces(vclass, std::min(b.centers[j], sc.supply.x_hat));
        b.cap[j] = binomial ? b.m[j] * (1.0 - kPoleHeadroom) : b.m[j];
    }
    return b;
}

/// Projection onto {u in [0, cap], sum a_j u_j = N} by Dykstra's alternation
/// between the box and the mass hyperplane, finished by an exact repair pass
/// that restores the mass among coordinates with room. The repair keeps the
/// returned point feasible to machine precision even when the alternation is
/// cut off early; an infeasible iterate would poison the line search (zero
/// steps would no longer map to zero moves).
void project_mass_box(std::vector<double>& u, const std::vector<double>& a,
                      const std::vector<double>& cap, double target) {
    const std::size_t n = u.size();
    std::vector<double> p(n, 0.0), q(n, 0.0), y(n), z = u;
    double a_dot_a = 0.0;
    for (double v : a) a_dot_a += v * v;
    if (a_dot_a <= 0.0) return;
    for (int sweep = 0; sweep < 100; ++sweep) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = z[j] + p[j];
            y[j] = std::clamp(w, 0.0, cap[j]);
            p[j] = w - y[j];
        }
        double mass = 0.0;
        for (std::size_t j = 0; j < n; ++j) mass += a[j] * (y[j] + q[j]);
        const double shift = (target - mass) / a_dot_a;
        double box_violation = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double w = y[j] + q[j];
            z[j] = w + shift * a[j];
            q[j] = w - z[j];
            box_violation = std::max(box_violation,
                                     std::max(-z[j], z[j] - cap[j]));
        }
        if (std::abs(shift) * std::sqrt(a_dot_a) <= 1e-14 * std::max(1.0, target) &&
            box_violation <= 1e-14)
            break;
    }
    for (std::size_t j = 0; j < n; ++j) u[j] = std::clamp(z[j], 0.0, cap[j]);

    for (int pass = 0; pass < 64; ++pass) {
        double mass = 0.0;
        for (std::size_t j = 0; j < n; ++j) mass += a[j] * u[j];
        const double deficit = target - mass;
        if (std::abs(deficit) <= 1e-13 * std::max(1.0, target)) break;
        double room = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if ((deficit > 0.0 && u[j] < cap[j]) || (deficit < 0.0 && u[j] > 0.0))
                room += a[j] * a[j];
        if (room <= 0.0) break;
        for (std::size_t j = 0; j < n; ++j)
            if ((deficit > 0.0 && u[j] < cap[j]) || (deficit < 0.0 && u[j] > 0.0))
                u[j] = std::clamp(u[j] + deficit * a[j] / room, 0.0, cap[j]);
    }
}

double objective_of(const Scenario& sc, VehicleClass vclass, const Bins& b,
                    const std::vector<double>& densities) {
    const double lambda = sc.lambda(vclass);
    const double gamma = sc.gamma(vclass);
    double total = 0.0;
    for (std::size_t j = 0; j < densities.size(); ++j) {
        const double n = densities[j];
        total += (lambda * b.centers[j] + gamma * search_time(sc.search, n, b.m[j])) * n * b.h;
    }
    return total;
}

double marginal_at(const Scenario& sc, VehicleClass vclass, const Bins& b,
                   double u, std::size_t j) {
    const double n = u * b.m[j];
    const double s = search_time(sc.search, n, b.m[j]);
    const double sn = search_partials(sc.search, n, b.m[j]).dn;
    return sc.lambda(vclass) * b.centers[j] + sc.gamma(vclass) * (s + n * sn);
}

/// Stationarity residual of the converged point: active bins must carry a
/// marginal cost equal to the shared level. Bins parked in a small occupancy
/// band around the piecewise kink are measured against the interval spanned
/// by the two branch rates: the subdifferential there covers every value in
/// between, and the projected iterates chatter within the band rather than
/// landing on the nonsmooth point exactly.
constexpr double kKinkBand = 1e-2;

double kkt_spread_of(const Scenario& sc, VehicleClass vclass, const Bins& b,
                     const std::vector<double>& u, double& level_out) {
    const double gamma = sc.gamma(vclass);
    const bool piecewise = sc.search.kind == SearchModel::Kind::PiecewiseLinear;
    const double knee = piecewise ? 1.0 - sc.search.omega : 2.0;

    double max_n = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) max_n = std::max(max_n, u[j] * b.m[j]);
    const double active_floor = 1e-3 * max_n;

    double level = 0.0;
    int free_bins = 0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double n = u[j] * b.m[j];
        if (n <= active_floor) continue;
        if (piecewise && std::abs(u[j] - knee) <= kKinkBand) continue;
        level += marginal_at(sc, vclass, b, u[j], j);
        ++free_bins;
    }
    if (free_bins == 0) {
        level_out = 0.0;
        return 0.0;
    }
    level /= free_bins;
    level_out = level;

    double spread = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        const double n = u[j] * b.m[j];
        if (n <= active_floor) continue;
        double lo, hi;
        if (piecewise && std::abs(u[j] - knee) <= kKinkBand) {
            const double x = b.centers[j];
            const double s = search_time(sc.search, n, b.m[j]);
            lo = sc.lambda(vclass) * x + gamma * (s + n * sc.search.delta / b.m[j]);
            hi = sc.lambda(vclass) * x + gamma * (s + n * sc.search.Delta / b.m[j]);
        } else {
            lo = hi = marginal_at(sc, vclass, b, u[j], j);
        }
        double dist = 0.0;
        if (level < lo) dist = lo - level;
        else if (level > hi) dist = level - hi;
        spread = std::max(spread, dist);
    }
    return level != 0.0 ? spread / std::abs(level) : spread;
}

/// Inverts P(n) = level for one bin given its cruising component.
double invert_cost(const Scenario& sc, VehicleClass vclass, const Bins& b, std::size_t j,
                   double level, double cruise) {
    const double t = (level - sc.lambda(vclass) * b.centers[j] - cruise) / sc.gamma(vclass);
    const double m = b.m[j];
    if (sc.search.kind == SearchModel::Kind::Binomial) {
        if (t <= 1.0) return 0.0;
        return std::min(b.cap[j], m * (1.0 - 1.0 / t));
    }
    if (t <= 0.0) return 0.0;
    const double knee = 1.0 - sc.search.omega;
    const double s_knee = sc.search.delta * knee;
    if (t <= s_knee) return m * t / sc.search.delta;
    return std::min(m, m * (knee + (t - s_knee) / sc.search.Delta));
}

/// Discrete cruising field with the half-own-bin convention, which makes the
/// total cruising cost match the closed form exactly for any distribution.
void cruising_field(const Scenario& sc, VehicleClass vclass, const Bins& b,
                    const std::vector<double>& n, std::vector<double>& c) {
    const std::size_t count = n.size();
    c.resize(count);
    if (vclass == VehicleClass::HV) {
        double behind = 0.0;
        for (std::size_t j = count; j-- > 0;) {
            c[j] = sc.beta_c * (behind + 0.5 * n[j] * b.h);
            behind += n[j] * b.h;
        }
    } else {
        const double base = sc.beta_c * sc.demand_hv();
        double ahead = 0.0;
        for (std::size_t j = 0; j < count; ++j) {
            c[j] = base + sc.beta_a * (ahead + 0.5 * n[j] * b.h);
            ahead += n[j] * b.h;
        }
    }
}

}  // namespace

double BinnedSolution::support_span() const {
    double span = 0.0;
    for (std::size_t j = 0; j < n.size(); ++j)
        if (n[j] > 1e-6) span = centers[j];
    return span;
}

BinnedSolution binned_optimum(const Scenario& sc, VehicleClass vclass, int bins, double x_max,
                              std::vector<double>* objective_trace) {
    Bins b = make_bins(sc, vclass, bins, x_max);
    BinnedSolution sol;
    sol.vclass = vclass;
    sol.mode = SolveMode::Optimum;
    sol.centers = b.centers;
    sol.h = b.h;
    sol.n.assign(bins, 0.0);

    const double target = sc.demand(vclass);
    if (target <= 0.0) {
        sol.converged = true;
        return sol;
    }

    std::vector<double> a(bins);
    double capacity = 0.0;
    for (int j = 0; j < bins; ++j) {
        a[j] = b.m[j] * b.h;
        capacity += a[j] * (b.cap[j] / std::max(b.m[j], 1e-300));
    }
    if (capacity <= target)
        throw SolverError(SolverError::Kind::InfeasibleSupply,
                          "oracle domain cannot hold the class demand", capacity);

    std::vector<double> cap_u(bins);
    for (int j = 0; j < bins; ++j) cap_u[j] = b.cap[j] / std::max(b.m[j], 1e-300);
    if (sc.search.kind == SearchModel::Kind::PiecewiseLinear) {
        // The optimum stays out of the steep branch unless the cost level
        // exceeds the marginal-cost jump gamma (1-omega)(Delta - delta) at
        // the kink; capping the box at the kink occupancy keeps the
        // objective smooth for the line search. The stationarity check
        // still validates kink-capped bins against the full subdifferential
        // and fails loudly if the cap ever binds incorrectly.
        const double knee = 1.0 - sc.search.omega;
        double knee_capacity = 0.0;
        for (int j = 0; j < bins; ++j) knee_capacity += a[j] * knee;
        if (knee_capacity > target)
            for (int j = 0; j < bins; ++j) cap_u[j] = std::min(cap_u[j], knee);
    }

    double total_a = 0.0;
    for (double v : a) total_a += v;
    std::vector<double> u(bins, std::min(0.999, target / total_a));
    project_mass_box(u, a, cap_u, target);

    auto eval = [&](const std::vector<double>& cand) {
        std::vector<double> n(bins);
        for (int j = 0; j < bins; ++j) n[j] = cand[j] * b.m[j];
        return objective_of(sc, vclass, b, n);
    };
    double value = eval(u);

    std::vector<double> grad(bins), trial(bins);
    const int max_iterations = 60000;
    const double kkt_tol = 5e-4;
    int it = 0;
    for (; it < max_iterations; ++it) {
        for (int j = 0; j < bins; ++j) grad[j] = marginal_at(sc, vclass, b, u[j], j) * a[j];

        bool moved = false;
        double t = 1.0;
        for (int back = 0; back < 60; ++back, t *= 0.5) {
            for (int j = 0; j < bins; ++j) trial[j] = u[j] - t * grad[j];
            project_mass_box(trial, a, cap_u, target);
            double decrease = 0.0;
            for (int j = 0; j < bins; ++j) decrease += grad[j] * (u[j] - trial[j]);
            if (decrease <= 0.0) continue;
            const double cand = eval(trial);
            if (cand <= value - 1e-4 * decrease) {
                u.swap(trial);
                value = cand;
                moved = true;
                break;
            }
        }
        if (objective_trace) objective_trace->push_back(value);
        if (it % 10 == 0 || !moved) {
            double level;
            const double spread = kkt_spread_of(sc, vclass, b, u, level);
            if (spread <= kkt_tol) {
                sol.converged = true;
                break;
            }
        }
        if (!moved) break;  // no acceptable step remains
    }

    // Complementary slackness: locations whose empty-lot marginal cost
    // already exceeds the level cannot carry mass at the optimum. The
    // truncated projection leaves dust there; sweep it back to the support.
    {
        double level;
        kkt_spread_of(sc, vclass, b, u, level);
        const double s_min = sc.search.s_min();
        bool swept = false;
        for (int j = 0; j < bins; ++j) {
            const double empty_mp = sc.lambda(vclass) * b.centers[j] + sc.gamma(vclass) * s_min;
            if (u[j] > 0.0 && empty_mp > level * (1.0 + 1e-6)) {
                u[j] = 0.0;
                swept = true;
            }
        }
        if (swept) project_mass_box(u, a, cap_u, target);
    }

    for (int j = 0; j < bins; ++j) sol.n[j] = u[j] * b.m[j];
    sol.iterations = it;
    sol.objective = objective_of(sc, vclass, b, sol.n);
    sol.kkt_spread = kkt_spread_of(sc, vclass, b, u, sol.level);
    if (sol.kkt_spread <= kkt_tol) sol.converged = true;
    sol.mass = 0.0;
    for (int j = 0; j < bins; ++j) sol.mass += sol.n[j] * b.h;
    if (!sol.converged)
        throw SolverError(SolverError::Kind::NonConvergence,
                          "projected gradient stalled above the stationarity tolerance");
    return sol;
}

BinnedSolution binned_equilibrium(const Scenario& sc, VehicleClass vclass, int bins,
                                  double x_max, double cruise_seed) {
    Bins b = make_bins(sc, vclass, bins, x_max);
    BinnedSolution sol;
    sol.vclass = vclass;
    sol.mode = SolveMode::Equilibrium;
    sol.centers = b.centers;
    sol.h = b.h;
    sol.n.assign(bins, 0.0);

    const double target = sc.demand(vclass);
    if (target <= 0.0) {
        sol.converged = true;
        return sol;
    }

    std::vector<double> c(bins, 0.0), c_next(bins), n(bins, 0.0);
    const double cruise_base =
        vclass == VehicleClass::AV ? sc.beta_c * sc.demand_hv() : 0.0;
    for (int j = 0; j < bins; ++j) c[j] = cruise_base + cruise_seed;

    int inner_total = 0;
    auto mass_for_level = [&](double level) {
        for (int pass = 0; pass < 5000; ++pass) {
            ++inner_total;
            for (int j = 0; j < bins; ++j)
                n[j] = invert_cost(sc, vclass, b, j, level, c[j]);
            cruising_field(sc, vclass, b, n, c_next);
            double worst = 0.0;
            for (int j = 0; j < bins; ++j) {
                const double mixed = 0.5 * (c[j] + c_next[j]);
                worst = std::max(worst, std::abs(mixed - c[j]));
                c[j] = mixed;
            }
            if (worst <= 1e-12 * std::max(1.0, level)) break;
        }
        double mass = 0.0;
        for (int j = 0; j < bins; ++j) mass += n[j] * b.h;
        return mass;
    };

    const double s_min = sc.search.s_min();
    double lo = sc.gamma(vclass) * s_min + cruise_base;
    double hi = lo + sc.lambda(vclass) * x_max + 1.0;
    while (mass_for_level(hi) < target) {
        hi = lo + (hi - lo) * 2.0;
        if (hi - lo > 1e9)
            throw SolverError(SolverError::Kind::InfeasibleSupply,
                              "oracle domain cannot hold the class demand at any level");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-11 * std::max(1.0, hi); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mass_for_level(mid) < target) lo = mid;
        else hi = mid;
    }
    sol.level = 0.5 * (lo + hi);
    sol.mass = mass_for_level(sol.level);
    sol.n = n;
    sol.iterations = inner_total;
    sol.objective = objective_of(sc, vclass, b, sol.n);
    sol.converged = std::abs(sol.mass - target) / target <= 1e-6;
    if (!sol.converged)
        throw SolverError(SolverError::Kind::NonConvergence,
                          "equilibrium level bisection left a mass residual");
    return sol;
}

MarginalCheck finite_difference_marginal(const Scenario& sc, const BinnedSolution& sol,
                                         std::size_t j) {
    MarginalCheck check;
    const double n = sol.n[j];
    const double m = sc.spaces(sol.vclass, std::min(sol.centers[j], sc.supply.x_hat));
    const double cap =
        sc.search.kind == SearchModel::Kind::Binomial ? m * (1.0 - kPoleHeadroom) : m;
    const double lambda = sc.lambda(sol.vclass);
    const double gamma = sc.gamma(sol.vclass);

    auto cost_of = [&](double density) {
        return (lambda * sol.centers[j] + gamma * search_time(sc.search, density, m)) * density *
               sol.h;
    };

    const double s = search_time(sc.search, std::min(n, cap), m);
    const double sn = search_partials(sc.search, std::min(n, cap), m).dn;
    check.analytic = lambda * sol.centers[j] + gamma * (s + std::min(n, cap) * sn);

    double h_fd = 1e-4 * n;
    if (n <= 0.0 || h_fd <= 0.0) {
        // One-sided at the lower bound.
        check.at_bound = true;
        h_fd = 1e-6 * std::max(1.0, m);
        check.finite_difference = (cost_of(h_fd) - cost_of(0.0)) / (h_fd * sol.h);
    } else if (n + h_fd > cap) {
        check.at_bound = true;
        check.finite_difference = (cost_of(n) - cost_of(n - h_fd)) / (h_fd * sol.h);
    } else {
        check.finite_difference = (cost_of(n + h_fd) - cost_of(n - h_fd)) / (2.0 * h_fd * sol.h);
    }

    if (sc.search.kind == SearchModel::Kind::PiecewiseLinear) {
        const double knee_density = m * (1.0 - sc.search.omega);
        if (std::abs(n - knee_density) <= std::max(h_fd, 1e-12))
            check.straddles_kink = true;
    }

    const double scale = std::max(std::abs(check.analytic), 1e-12);
    check.rel_error = std::abs(check.finite_difference - check.analytic) / scale;
    return check;
}

}  // namespace curbflow
