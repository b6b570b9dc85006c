#include "curbflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curbflow/corridor_solver.hpp"
#include "curbflow/cost_model.hpp"
#include "curbflow/io.hpp"
#include "curbflow/oracle.hpp"
#include "curbflow/planner.hpp"
#include "curbflow/pricing.hpp"

namespace curbflow {

namespace {

struct Collector {
    std::vector<CheckResult>& out;

    void leq(const std::string& name, double computed, double limit) {
        out.push_back({name, computed, limit, limit, computed <= limit, false, ""});
    }
    void close(const std::string& name, double computed, double reference, double rel_tol) {
        const double scale = std::max(std::abs(reference), 1e-300);
        const double err = std::abs(computed - reference) / scale;
        out.push_back({name, computed, reference, rel_tol, err <= rel_tol, false, ""});
    }
    void truth(const std::string& name, bool ok, double computed = 0.0, double reference = 0.0) {
        out.push_back({name, computed, reference, 0.0, ok, false, ""});
    }
    void note(const std::string& name, const std::string& text) {
        out.push_back({name, 0.0, 0.0, 0.0, true, true, text});
    }
};

double max_increase(const std::vector<double>& n) {
    double worst = 0.0;
    for (std::size_t i = 1; i < n.size(); ++i) worst = std::max(worst, n[i] - n[i - 1]);
    return worst;
}

double cruising_total_numeric(const Scenario& sc, const SpatialSolution& sol) {
    const std::vector<double> c = cruising_profile(sc, sol);
    std::vector<double> integrand(sol.xs.size());
    for (std::size_t i = 0; i < sol.xs.size(); ++i) integrand[i] = sol.n[i] * c[i];
    return trapezoid(sol.xs, integrand);
}

}  // namespace

bool VerificationReport::all_pass() const {
    for (const CheckResult& c : checks)
        if (!c.is_note && !c.pass) return false;
    return true;
}

std::string VerificationReport::to_text() const {
    std::ostringstream out;
    for (const CheckResult& c : checks) {
        if (c.is_note) {
            out << "NOTE " << c.name << ": " << c.detail << '\n';
            continue;
        }
        out << (c.pass ? "PASS " : "FAIL ") << c.name << ": computed=" << format_number(c.computed)
            << " reference=" << format_number(c.reference)
            << " tolerance=" << format_number(c.tolerance) << '\n';
    }
    return out.str();
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const CheckResult& c : checks) {
        nlohmann::json j;
        j["name"] = c.name;
        if (c.is_note) {
            j["note"] = c.detail;
        } else {
            j["computed"] = c.computed;
            j["reference"] = c.reference;
            j["tolerance"] = c.tolerance;
            j["pass"] = c.pass;
        }
        arr.push_back(j);
    }
    return nlohmann::json{{"checks", arr}, {"all_pass", all_pass()}};
}

VerificationReport run_verification(const Scenario& sc, int bins) {
    VerificationReport report;
    Collector add{report.checks};

    const SufficiencyReport suff = check_supply_sufficiency(sc);
    add.truth("supply_sufficiency_av", suff.feasible_av || sc.demand_av() <= 0.0,
              suff.margin_av());
    add.truth("supply_sufficiency_hv", suff.feasible_hv || sc.demand_hv() <= 0.0,
              suff.margin_hv());

    const bool constant_supply = sc.supply.kind == SupplyProfile::Kind::Constant;
    const bool piecewise = sc.search.kind == SearchModel::Kind::PiecewiseLinear;

    struct Solved {
        VehicleClass vclass;
        SolveMode mode;
        SpatialSolution sol;
    };
    std::vector<Solved> solved;
    for (VehicleClass vc : {VehicleClass::AV, VehicleClass::HV}) {
        if (sc.demand(vc) <= 0.0) continue;
        for (SolveMode mode : {SolveMode::Equilibrium, SolveMode::Optimum})
            solved.push_back({vc, mode, solve_llp(sc, vc, mode)});
    }

    for (const Solved& s : solved) {
        const std::string tag = std::string(class_tag(s.vclass)) + "_" + mode_tag(s.mode);
        add.leq("flatness_" + tag, s.sol.diag.flatness_residual, 1e-3);
        add.leq("mass_residual_" + tag, s.sol.diag.mass_residual, 1e-4);
        add.leq("edge_density_" + tag, std::abs(s.sol.n.back()), 1e-12);
        if (constant_supply) {
            // Strictly decreasing for the smooth model; the piecewise optimum
            // may hold a flat saturated core at the kink occupancy.
            const double slack =
                (piecewise && s.mode == SolveMode::Optimum) ? 1e-9 * sc.demand(s.vclass) : 0.0;
            add.leq("monotone_density_" + tag, max_increase(s.sol.n), slack);
        }
        const double closed = s.vclass == VehicleClass::AV ? av_cruising_total(sc)
                                                           : hv_cruising_total(sc);
        if (closed > 0.0)
            add.close("cruising_constant_" + tag, cruising_total_numeric(sc, s.sol), closed, 5e-3);
    }

    auto find = [&](VehicleClass vc, SolveMode mode) -> const SpatialSolution* {
        for (const Solved& s : solved)
            if (s.vclass == vc && s.mode == mode) return &s.sol;
        return nullptr;
    };

    // Cruising-bias comparisons against the beta = 0 solve.
    if (sc.beta_a > 0.0 && sc.beta_c > 0.0) {
        if (const SpatialSolution* eq_a = find(VehicleClass::AV, SolveMode::Equilibrium)) {
            const SpatialSolution bare = no_cruising_solution(sc, VehicleClass::AV, SolveMode::Equilibrium);
            add.truth("av_span_shrinks_with_cruising", eq_a->span < bare.span, eq_a->span, bare.span);
        }
        if (const SpatialSolution* eq_c = find(VehicleClass::HV, SolveMode::Equilibrium)) {
            const SpatialSolution bare = no_cruising_solution(sc, VehicleClass::HV, SolveMode::Equilibrium);
            add.truth("hv_span_grows_with_cruising", eq_c->span > bare.span, eq_c->span, bare.span);
        }
    }
    if (const SpatialSolution* eq_a = find(VehicleClass::AV, SolveMode::Equilibrium))
        if (const SpatialSolution* op_a = find(VehicleClass::AV, SolveMode::Optimum))
            add.truth("av_optimum_span_at_least_equilibrium", eq_a->span <= op_a->span + 1e-9,
                      eq_a->span, op_a->span);

    // Oracle cross-checks.
    for (VehicleClass vc : {VehicleClass::AV, VehicleClass::HV}) {
        if (sc.demand(vc) <= 0.0) continue;
        const std::string tag = class_tag(vc);
        const SpatialSolution* ode_opt = find(vc, SolveMode::Optimum);
        const SpatialSolution* ode_eq = find(vc, SolveMode::Equilibrium);

        const BinnedSolution opt = binned_optimum(sc, vc, bins, 2.0 * ode_opt->span);
        add.close("oracle_objective_" + tag, opt.objective,
                  total_parking_cost_excl_cruising(sc, *ode_opt), 5e-3);
        add.leq("oracle_kkt_spread_" + tag, opt.kkt_spread, 1e-3);
        add.close("oracle_span_" + tag, opt.support_span(), ode_opt->span, 2e-2);

        double worst_fd = 0.0;
        int sampled = 0;
        for (std::size_t j = 0; j < opt.n.size() && sampled < 40; j += opt.n.size() / 40 + 1) {
            if (opt.n[j] <= 1e-3 * sc.demand(vc) / (2.0 * ode_opt->span)) continue;
            const MarginalCheck mc = finite_difference_marginal(sc, opt, j);
            if (mc.at_bound || mc.straddles_kink) continue;
            worst_fd = std::max(worst_fd, mc.rel_error);
            ++sampled;
        }
        add.leq("oracle_fd_marginal_" + tag, worst_fd, 1e-4);

        const BinnedSolution eq = binned_equilibrium(sc, vc, bins, 2.0 * ode_eq->span);
        add.close("oracle_equilibrium_level_" + tag, eq.level, ode_eq->level, 1e-2);
    }

    // Closed-form vs numeric shooting under the hard-cap approximation.
    if (piecewise && constant_supply) {
        for (VehicleClass vc : {VehicleClass::AV, VehicleClass::HV}) {
            if (sc.demand(vc) <= 0.0) continue;
            for (SolveMode mode : {SolveMode::Equilibrium, SolveMode::Optimum}) {
                const SpatialSolution cf = closed_form_llp(sc, vc, mode);
                const SpatialSolution* num = find(vc, mode);
                const std::string tag = std::string(class_tag(vc)) + "_" + mode_tag(mode);
                add.close("closed_form_span_" + tag, num->span, cf.span, 2e-2);
                add.close("closed_form_level_" + tag, num->level, cf.level, 2e-2);
            }
        }
        add.note("hard_cap_equilibrium_levels",
                 "closed-form equilibrium levels treat the steep search branch as a hard "
                 "occupancy cap and sit slightly above the finite-slope numeric levels; "
                 "both routes are reported");
        // The aggregate-cost formula is exact only where both classes carry a
        // saturated core; below that demand the linear tail alone holds the
        // class and the formula overstates its cost.
        if (sc.demand_av() > 0.0 && sc.demand_hv() > 0.0 &&
            closed_form_core_exists(sc, VehicleClass::AV) &&
            closed_form_core_exists(sc, VehicleClass::HV)) {
            const SpatialSolution cf_a = closed_form_llp(sc, VehicleClass::AV, SolveMode::Optimum);
            const SpatialSolution cf_c = closed_form_llp(sc, VehicleClass::HV, SolveMode::Optimum);
            const double tc_pricing = priced_total_cost(sc, cf_a, cf_c);
            const double tc_formula =
                closed_form_total_cost(sc, sc.supply.theta, sc.supply.k);
            add.close("tc_consistency_pricing_vs_formula", tc_pricing, tc_formula, 1e-6);
        }
    }

    // Planning-design checks.
    if (sc.planning && piecewise && sc.epsilon > 0.0 && sc.epsilon < 1.0) {
        const BenchmarkDesign bench = benchmark_design(sc);
        const Design d1 = first_best(sc);
        const Design d2 = second_best(sc);
        add.close("first_best_identity", tc_closed_form(sc, d1).tc, minimized_tc_first_best(sc),
                  1e-9);
        add.close("second_best_identity", tc_closed_form(sc, d2).tc, minimized_tc_second_best(sc),
                  1e-9);
        add.truth("theta_ordering", d1.theta <= d2.theta + 1e-12 &&
                                        d2.theta <= bench.design.theta + 1e-12,
                  d1.theta, bench.design.theta);

        const ReductionBounds rb = reduction_bounds(sc);
        double worst_52 = -1.0, worst_53 = -1.0, worst_54 = -1.0;
        for (int i = 1; i <= 19; ++i) {
            Scenario at = sc;
            at.epsilon = 0.05 * i;
            const BenchmarkDesign b2 = benchmark_design(at);
            const double tc_b = tc_closed_form(at, b2.design).tc;
            const double tc_1 = tc_closed_form(at, first_best(at)).tc;
            const double tc_2 = tc_closed_form(at, second_best(at)).tc;
            worst_52 = std::max(worst_52, (tc_b - tc_1) / tc_b - rb.l52);
            worst_53 = std::max(worst_53, (tc_b - tc_2) / tc_b - rb.l53);
            worst_54 = std::max(worst_54, (tc_2 - tc_1) / tc_2 - rb.l54);
        }
        add.truth("bound_first_best_strict", worst_52 < 0.0, worst_52);
        add.truth("bound_second_best_strict", worst_53 < 0.0, worst_53);
        add.truth("bound_gap_holds", worst_54 <= 1e-12, worst_54);
        add.truth("budget_saving_nonnegative", budget_saving(sc).amount >= 0.0,
                  budget_saving(sc).amount);
        add.note("second_best_width_convention",
                 "the width-capped optimum keeps k fixed at the benchmark width k_b; only the "
                 "AV share moves. Published summaries quoting a smaller paired width reflect a "
                 "different convention, not this solver's output");
    }

    return report;
}

}  // namespace curbflow
