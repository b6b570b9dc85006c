// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Reference values and tolerances are pinned here, not configurable.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "curbflow/corridor_solver.hpp"
#include "curbflow/cost_model.hpp"
#include "curbflow/oracle.hpp"
#include "curbflow/planner.hpp"
#include "curbflow/pricing.hpp"
#include "scenarios.hpp"

using namespace curbflow;
using curbflow::testing::base_scenario;
using curbflow::testing::sigmoid_scenario;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool ok, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
                detail.c_str());
    if (!ok) ++failures;
}

bool within_abs(double value, double ref, double tol) { return std::abs(value - ref) <= tol; }
bool within_rel(double value, double ref, double tol) {
    return std::abs(value - ref) <= tol * std::abs(ref);
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void criterion_1() {
    const Scenario s = base_scenario(0.25, SearchModel::Kind::PiecewiseLinear);
    const Design d1 = first_best(s);
    const Design d2 = second_best(s);
    const BenchmarkDesign bench = benchmark_design(s);
    bool ok = within_abs(d1.theta, 0.1469, 0.001);
    ok = within_abs(d1.k, 43744.0, 10.0) && ok;
    ok = within_abs(d2.theta, 0.1740, 0.001) && ok;
    ok = d2.k == s.planning->k_b && ok;
    ok = within_abs(bench.design.theta, 0.3478, 0.0005) && ok;
    ok = within_rel(bench.budget, 2.348e7, 0.001) && ok;
    report(1, "closed-form designs", ok,
           "first {" + num(d1.theta) + ", " + num(d1.k) + "}, second {" + num(d2.theta) + ", " +
               num(d2.k) + "}, benchmark theta " + num(bench.design.theta) + ", budget " +
               num(bench.budget));
}

void criterion_2() {
    const Scenario s = base_scenario(0.25, SearchModel::Kind::PiecewiseLinear);
    const double tc_b = tc_closed_form(s, benchmark_design(s).design).tc;
    const double tc_1 = tc_closed_form(s, first_best(s)).tc;
    const double tc_2 = tc_closed_form(s, second_best(s)).tc;
    const double red_1 = (tc_b - tc_1) / tc_b;
    const double red_2 = (tc_b - tc_2) / tc_b;
    const double gap = (tc_2 - tc_1) / tc_2;
    const BudgetSaving saving = budget_saving(s);
    bool ok = within_abs(red_1, 0.092, 0.002);
    ok = within_abs(red_2, 0.057, 0.002) && ok;
    ok = within_abs(gap, 0.036, 0.002) && ok;
    ok = within_abs(saving.fraction, 0.074, 0.002) && ok;
    report(2, "cost reductions at 40% penetration", ok,
           "first " + num(red_1) + ", second " + num(red_2) + ", gap " + num(gap) + ", saving " +
               num(saving.fraction));
}

void criterion_3() {
    const Scenario s = base_scenario(0.25, SearchModel::Kind::PiecewiseLinear);
    const ReductionBounds b = reduction_bounds(s);
    bool ok = within_abs(b.l52, 0.262, 0.001);
    ok = within_abs(b.l53, 0.188, 0.001) && ok;
    ok = within_abs(b.l54, 0.148, 0.001) && ok;
    for (int i = 1; i <= 19; ++i) {
        Scenario at = s;
        at.epsilon = 0.05 * i;
        const double tc_b = tc_closed_form(at, benchmark_design(at).design).tc;
        const double tc_1 = tc_closed_form(at, first_best(at)).tc;
        const double tc_2 = tc_closed_form(at, second_best(at)).tc;
        ok = ((tc_b - tc_1) / tc_b < b.l52) && ok;
        ok = ((tc_b - tc_2) / tc_b < b.l53) && ok;
        ok = ((tc_2 - tc_1) / tc_2 <= b.l54 + 1e-12) && ok;
    }
    ok = within_abs(b.max_first, 0.107, 0.003) && within_abs(b.eps_max_first, 0.61, 0.05) && ok;
    ok = within_abs(b.max_second, 0.073, 0.003) && within_abs(b.eps_max_second, 0.66, 0.05) && ok;
    ok = within_abs(b.max_gap, 0.038, 0.003) && within_abs(b.eps_max_gap, 0.51, 0.05) && ok;
    report(3, "reduction bounds and grid maxima", ok,
           "bounds {" + num(b.l52) + ", " + num(b.l53) + ", " + num(b.l54) + "}, maxima {" +
               num(b.max_first) + "@" + num(b.eps_max_first) + ", " + num(b.max_second) + "@" +
               num(b.eps_max_second) + ", " + num(b.max_gap) + "@" + num(b.eps_max_gap) + "}");
}

void criterion_4() {
    const SpatialSolution hv05 = solve_equilibrium(base_scenario(0.5), VehicleClass::HV);
    const SpatialSolution av05 = solve_equilibrium(base_scenario(0.5), VehicleClass::AV);
    const SpatialSolution hv25 = solve_equilibrium(base_scenario(0.25), VehicleClass::HV);
    const SpatialSolution av25 = solve_equilibrium(base_scenario(0.25), VehicleClass::AV);
    bool ok = within_rel(hv05.level, 2.98, 0.05) && within_rel(av05.level, 1.84, 0.05);
    ok = within_rel(hv25.level, 2.11, 0.05) && within_rel(av25.level, 2.03, 0.05) && ok;
    const double red05 = unpriced_vs_priced_reduction(base_scenario(0.5)).reduction;
    const double red25 = unpriced_vs_priced_reduction(base_scenario(0.25)).reduction;
    ok = within_abs(red05, 0.131, 0.005) && within_abs(red25, 0.089, 0.005) && ok;
    report(4, "equilibrium levels and pricing reductions", ok,
           "levels {" + num(hv05.level) + ", " + num(av05.level) + "} {" + num(hv25.level) +
               ", " + num(av25.level) + "}, reductions " + num(red05) + ", " + num(red25));
}

void criterion_5() {
    bool ok = true;
    std::string detail;
    for (double theta : {0.5, 0.25}) {
        const Scenario s = base_scenario(theta, SearchModel::Kind::PiecewiseLinear);
        for (VehicleClass vc : {VehicleClass::AV, VehicleClass::HV}) {
            for (SolveMode mode : {SolveMode::Equilibrium, SolveMode::Optimum}) {
                const SpatialSolution numeric = solve_llp(s, vc, mode);
                const SpatialSolution closed = closed_form_llp(s, vc, mode);
                ok = within_rel(numeric.span, closed.span, 0.02) && ok;
                ok = within_rel(numeric.level, closed.level, 0.02) && ok;
            }
        }
        const SpatialSolution av = solve_llp(s, VehicleClass::AV, SolveMode::Equilibrium);
        detail += "theta " + num(theta) + " av span " + num(av.span) + "; ";
    }
    report(5, "numeric piecewise solve vs closed forms within 2%", ok, detail);
}

void criterion_6() {
    bool ok = true;
    std::string detail;
    for (SearchModel::Kind kind :
         {SearchModel::Kind::Binomial, SearchModel::Kind::PiecewiseLinear}) {
        const Scenario s = base_scenario(0.5, kind);
        for (VehicleClass vc : {VehicleClass::AV, VehicleClass::HV}) {
            const SpatialSolution ode = solve_optimum(s, vc);
            const BinnedSolution oracle = binned_optimum(s, vc, 2000, 2.0 * ode.span);
            const double tp = total_parking_cost_excl_cruising(s, ode);
            const bool obj_ok = within_rel(oracle.objective, tp, 0.005);
            const bool kkt_ok = oracle.kkt_spread <= 1e-3;
            double worst_fd = 0.0;
            for (std::size_t j = 0; j < oracle.n.size(); j += 29) {
                if (oracle.n[j] <= 1.0) continue;
                const MarginalCheck mc = finite_difference_marginal(s, oracle, j);
                if (mc.at_bound || mc.straddles_kink) continue;
                worst_fd = std::max(worst_fd, mc.rel_error);
            }
            const bool fd_ok = worst_fd <= 1e-4;
            ok = obj_ok && kkt_ok && fd_ok && ok;
            detail += std::string(class_tag(vc)) +
                      (kind == SearchModel::Kind::Binomial ? "/bin " : "/pw ") +
                      num(std::abs(oracle.objective - tp) / tp) + " kkt " +
                      num(oracle.kkt_spread) + "; ";
        }
    }
    report(6, "oracle equivalence (objective 0.5%, KKT 1e-3, FD 1e-4)", ok, detail);
}

void criterion_7() {
    bool ok = true;
    std::string notes;

    for (double theta : {0.5, 0.25}) {
        for (SearchModel::Kind kind :
             {SearchModel::Kind::Binomial, SearchModel::Kind::PiecewiseLinear}) {
            const Scenario s = base_scenario(theta, kind);
            for (VehicleClass vc : {VehicleClass::AV, VehicleClass::HV}) {
                for (SolveMode mode : {SolveMode::Equilibrium, SolveMode::Optimum}) {
                    const SpatialSolution sol = solve_llp(s, vc, mode);
                    ok = sol.diag.flatness_residual <= 1e-3 && ok;
                    ok = sol.diag.mass_residual <= 1e-4 && ok;
                    ok = sol.n.back() == 0.0 && ok;
                    double worst_increase = 0.0;
                    for (std::size_t i = 1; i < sol.n.size(); ++i)
                        worst_increase = std::max(worst_increase, sol.n[i] - sol.n[i - 1]);
                    const double slack =
                        (kind == SearchModel::Kind::PiecewiseLinear && mode == SolveMode::Optimum)
                            ? 1e-9 * s.demand(vc)
                            : 0.0;
                    ok = worst_increase <= slack && ok;
                }
            }
        }
    }

    {
        const Scenario s = base_scenario(0.5);
        const SpatialSolution av_eq = solve_equilibrium(s, VehicleClass::AV);
        const SpatialSolution av_opt = solve_optimum(s, VehicleClass::AV);
        ok = av_eq.span <= av_opt.span + 1e-9 && ok;
        const SpatialSolution av_bare =
            no_cruising_solution(s, VehicleClass::AV, SolveMode::Equilibrium);
        const SpatialSolution hv_eq = solve_equilibrium(s, VehicleClass::HV);
        const SpatialSolution hv_bare =
            no_cruising_solution(s, VehicleClass::HV, SolveMode::Equilibrium);
        ok = av_eq.span < av_bare.span && ok;
        ok = hv_eq.span > hv_bare.span && ok;
        notes += "spans av e/o " + num(av_eq.span) + "/" + num(av_opt.span) + "; ";
    }

    // cruising-cost constancy across five distinct feasible distributions
    {
        const Scenario s = base_scenario(0.5);
        std::vector<SpatialSolution> dists;
        dists.push_back(solve_equilibrium(s, VehicleClass::HV));
        dists.push_back(solve_optimum(s, VehicleClass::HV));
        for (double span : {0.65, 0.8, 1.0}) {
            SpatialSolution flat;
            flat.vclass = VehicleClass::HV;
            flat.mode = SolveMode::Equilibrium;
            const int count = 801;
            flat.xs.resize(count);
            flat.n.resize(count);
            for (int i = 0; i < count; ++i) {
                flat.xs[i] = span * i / (count - 1.0);
                flat.n[i] = 1.0 + static_cast<double>(count - 1 - i) / (count - 1.0);
            }
            const double raw = trapezoid(flat.xs, flat.n);
            for (double& v : flat.n) v *= s.demand_hv() / raw;
            flat.span = span;
            dists.push_back(flat);
        }
        for (const SpatialSolution& d : dists) {
            const std::vector<double> c = cruising_profile(s, d);
            std::vector<double> integrand(d.xs.size());
            for (std::size_t i = 0; i < d.xs.size(); ++i) integrand[i] = d.n[i] * c[i];
            ok = within_rel(trapezoid(d.xs, integrand), hv_cruising_total(s), 0.005) && ok;
        }
    }

    // decentralization: P + tau flat at the optimum, AV price strictly falling
    for (double theta : {0.5, 0.25}) {
        const Scenario s = base_scenario(theta);
        const SpatialSolution av = solve_optimum(s, VehicleClass::AV);
        const SpatialSolution hv = solve_optimum(s, VehicleClass::HV);
        const PricingSchedule ps = optimal_prices(s, av, hv);
        const double target_av = av.level + s.beta_c * s.demand_hv() + s.beta_a * s.demand_av();
        const double target_hv = hv.level;
        double prev_tau = 1e300;
        for (std::size_t i = 0; i < ps.xs.size(); ++i) {
            const double x = ps.xs[i];
            if (x <= av.span) {
                ok = std::abs(generalized_cost(s, av, x).total + ps.tau_a[i] - target_av) <=
                         1e-3 * target_av &&
                     ok;
                ok = ps.tau_a[i] < prev_tau && ok;
                prev_tau = ps.tau_a[i];
            }
            if (x <= hv.span)
                ok = std::abs(generalized_cost(s, hv, x).total + ps.tau_c[i] - target_hv) <=
                         1e-3 * target_hv &&
                     ok;
        }
        ok = ps.tau_a.front() > ps.tau_a[1] && ok;
    }

    report(7, "structural property suite", ok, notes);
}

void criterion_8() {
    const Scenario sig = sigmoid_scenario();
    const SpatialSolution op_a = solve_optimum(sig, VehicleClass::AV);
    const SpatialSolution op_c = solve_optimum(sig, VehicleClass::HV);
    const SpatialSolution eq_a = solve_equilibrium(sig, VehicleClass::AV);
    const SpatialSolution eq_c = solve_equilibrium(sig, VehicleClass::HV);
    const double tc_sig = priced_total_cost(sig, op_a, op_c);

    const Scenario flat = base_scenario(0.25);
    const double tc_flat = priced_total_cost(flat, solve_optimum(flat, VehicleClass::AV),
                                             solve_optimum(flat, VehicleClass::HV));

    auto profile_np = [](const Scenario& s) {
        const int cells = 4000;
        const double h = s.supply.x_hat / cells;
        double np = 0.0;
        for (int i = 0; i <= cells; ++i) {
            const double x = i * h;
            const double w = (i == 0 || i == cells) ? 0.5 : 1.0;
            np += w * h * (s.planning->v_a * s.supply.theta_at(x) +
                           s.planning->rent.at(x, s.supply.x_hat)) * s.supply.k_at(x);
        }
        return np;
    };
    const double np_sig = profile_np(sig);
    const double np_flat = profile_np(flat);

    bool ok = within_rel(tc_sig, 49264.0, 0.02);
    ok = within_rel(tc_flat, 52611.0, 0.02) && ok;
    ok = within_rel(np_sig, 2.35e7, 0.01) && ok;
    ok = within_rel(np_flat, 2.27e7, 0.01) && ok;

    std::size_t peak = 0;
    for (std::size_t i = 0; i < op_a.n.size(); ++i)
        if (op_a.n[i] > op_a.n[peak]) peak = i;
    ok = peak > 0 && peak < op_a.n.size() - 1 && op_a.n[peak] > 2.0 * op_a.n.front() && ok;
    ok = op_a.span > eq_a.span && op_c.span > eq_c.span && ok;

    report(8, "location-dependent supply scenario", ok,
           "TC " + num(tc_sig) + " vs " + num(tc_flat) + ", NP " + num(np_sig) + " vs " +
               num(np_flat));
}

void criterion_9() {
    const Scenario s = base_scenario(0.25, SearchModel::Kind::PiecewiseLinear);
    // 200x200 cells: 201 sample lines per axis, endpoints included
    std::vector<double> thetas(201), ks(201);
    for (int i = 0; i <= 200; ++i) {
        thetas[i] = 0.02 + (0.98 - 0.02) * i / 200.0;
        ks[i] = 5000.0 + (60000.0 - 5000.0) * i / 200.0;
    }
    const SweepResult grid = sweep(s, thetas, ks, 0);
    bool ok = grid.best_index >= 0;
    const Design ref = first_best(s);
    if (ok) {
        const SweepCell& best = grid.cells[grid.best_index];
        ok = std::abs(best.theta - ref.theta) <= (0.98 - 0.02) / 200.0 + 1e-12 && ok;
        ok = std::abs(best.k - ref.k) <= 55000.0 / 200.0 + 1e-12 && ok;
    }
    const double budget = planning_budget(s);
    for (const SweepCell& cell : grid.cells) {
        const bool in_budget = cell.np <= budget * (1.0 + 1e-12);
        const bool supplied = cell.theta * cell.k / s.phi * 5.0 > s.demand_av() &&
                              (1.0 - cell.theta) * cell.k * 5.0 > s.demand_hv();
        if (cell.feasible != (in_budget && supplied)) {
            ok = false;
            break;
        }
    }
    const SweepResult bench_grid = sweep(s, {8.0 / 23.0}, {40000.0}, 1);
    ok = std::abs(bench_grid.cells[0].reduction) <= 1e-12 && ok;
    const SweepCell& best = grid.cells[grid.best_index];
    report(9, "design sweep fidelity", ok,
           "argmin {" + num(best.theta) + ", " + num(best.k) + "} vs {" + num(ref.theta) + ", " +
               num(ref.k) + "}");
}

void criterion_10() {
    const Scenario s = base_scenario(0.25, SearchModel::Kind::PiecewiseLinear);
    const double tc_1 = tc_closed_form(s, first_best(s)).tc;
    const double id_1 = minimized_tc_first_best(s);
    const double tc_2 = tc_closed_form(s, second_best(s)).tc;
    const double id_2 = minimized_tc_second_best(s);
    const bool ok = within_rel(tc_1, id_1, 1e-9) && within_rel(tc_2, id_2, 1e-9);
    report(10, "minimized-cost sign identity", ok,
           "first " + num(tc_1) + " vs " + num(id_1) + ", second " + num(tc_2) + " vs " +
               num(id_2));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
