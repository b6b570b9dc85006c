#include "curbflow/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "curbflow/cost_model.hpp"

namespace curbflow {

namespace {

const PlanningParams& required_planning(const Scenario& s) {
    if (!s.planning)
        throw ScenarioError("planning", "this operation needs the scenario's 'planning' block");
    return *s.planning;
}

struct PlanningContext {
    double x_hat, v_a, k_b, L, budget, mu;
};

PlanningContext context(const Scenario& s) {
    const PlanningParams& p = required_planning(s);
    PlanningContext c;
    c.x_hat = s.supply.x_hat;
    c.v_a = p.v_a;
    c.k_b = p.k_b;
    c.L = aggregate_rent(p, c.x_hat);
    c.mu = s.lambda_a / s.lambda_c;
    const double theta_b = s.epsilon * s.phi / (s.epsilon * s.phi + 1.0 - s.epsilon);
    c.budget = p.budget_override ? *p.budget_override : c.k_b * (c.v_a * theta_b * c.x_hat + c.L);
    return c;
}

double theta_benchmark(double epsilon, double phi) {
    return epsilon * phi / (epsilon * phi + 1.0 - epsilon);
}

double theta_first_best(double epsilon, double mu, double phi, double L, double v_a_xhat) {
    const double s = std::sqrt(mu * phi) * epsilon;
    return s / (s + (1.0 - epsilon) * std::sqrt((L + v_a_xhat) / L));
}

double theta_second_best(double epsilon, double mu, double phi) {
    const double s = std::sqrt(mu * phi) * epsilon;
    return s / (s + 1.0 - epsilon);
}

/// Total parking cost at optimal pricing for a constant design.
double tc_at(const Scenario& s, double epsilon, double theta, double k) {
    Scenario at_eps = s;
    at_eps.epsilon = epsilon;
    const double c_eps = planning_constant(at_eps);
    const double omega = s.search.omega;
    double inner = 0.0;
    const double hv_share = 1.0 - epsilon;
    if (hv_share > 0.0) {
        if (theta >= 1.0) throw std::domain_error("theta = 1 with HV demand present");
        inner += s.lambda_c * hv_share * hv_share / (1.0 - theta);
    }
    if (epsilon > 0.0) {
        if (theta <= 0.0) throw std::domain_error("theta = 0 with AV demand present");
        inner += s.phi * s.lambda_a * epsilon * epsilon / theta;
    }
    return c_eps + s.N * s.N / (k * (1.0 - omega)) * inner;
}

}  // namespace

double closed_form_total_cost(const Scenario& scenario, double theta, double k) {
    return tc_at(scenario, scenario.epsilon, theta, k);
}

BenchmarkDesign benchmark_design(const Scenario& scenario) {
    const PlanningContext c = context(scenario);
    BenchmarkDesign b;
    b.design.theta = theta_benchmark(scenario.epsilon, scenario.phi);
    b.design.k = c.k_b;
    b.design.tag = Design::Tag::Benchmark;
    b.budget = c.budget;
    return b;
}

double infrastructure_cost(const Scenario& scenario, const Design& design) {
    const PlanningContext c = context(scenario);
    return design.k * (c.v_a * design.theta * c.x_hat + c.L);
}

double planning_budget(const Scenario& scenario) { return context(scenario).budget; }

DesignEval tc_closed_form(const Scenario& scenario, const Design& design) {
    const PlanningContext c = context(scenario);
    if (scenario.search.kind != SearchModel::Kind::PiecewiseLinear)
        throw std::invalid_argument("tc_closed_form requires the piecewise search model");
    DesignEval eval;
    eval.tc = tc_at(scenario, scenario.epsilon, design.theta, design.k);
    eval.np = design.k * (c.v_a * design.theta * c.x_hat + c.L);
    eval.budget_ok = eval.np <= c.budget * (1.0 + 1e-12);
    const double supply_av = design.theta * design.k / scenario.phi * c.x_hat;
    const double supply_hv = (1.0 - design.theta) * design.k * c.x_hat;
    eval.supply_ok = (scenario.demand_av() <= 0.0 || supply_av > scenario.demand_av()) &&
                     (scenario.demand_hv() <= 0.0 || supply_hv > scenario.demand_hv());
    const double tc_bench =
        tc_at(scenario, scenario.epsilon, theta_benchmark(scenario.epsilon, scenario.phi), c.k_b);
    eval.reduction = (tc_bench - eval.tc) / tc_bench;
    return eval;
}

Design first_best(const Scenario& scenario) {
    const PlanningContext c = context(scenario);
    if (!(c.L > 0.0))
        throw ScenarioError("planning.rent.L0",
                            "first_best needs a positive aggregate land rent");
    Design d;
    d.tag = Design::Tag::FirstBest;
    d.theta = theta_first_best(scenario.epsilon, c.mu, scenario.phi, c.L, c.v_a * c.x_hat);
    d.k = c.budget / (c.v_a * d.theta * c.x_hat + c.L);
    return d;
}

Design second_best(const Scenario& scenario) {
    const PlanningContext c = context(scenario);
    Design d;
    d.tag = Design::Tag::SecondBest;
    d.theta = theta_second_best(scenario.epsilon, c.mu, scenario.phi);
    d.k = c.k_b;
    return d;
}

double minimized_tc_first_best(const Scenario& scenario) {
    const PlanningContext c = context(scenario);
    const double eps = scenario.epsilon;
    const double inner = std::sqrt(c.L) * (1.0 - eps) +
                         std::sqrt((c.v_a * c.x_hat + c.L) * c.mu * scenario.phi) * eps;
    return planning_constant(scenario) + scenario.lambda_c * inner * inner * scenario.N *
                                             scenario.N /
                                             ((1.0 - scenario.search.omega) * c.budget);
}

double minimized_tc_second_best(const Scenario& scenario) {
    const PlanningContext c = context(scenario);
    const double eps = scenario.epsilon;
    const double inner = (1.0 - eps) + std::sqrt(c.mu * scenario.phi) * eps;
    return planning_constant(scenario) + scenario.lambda_c * inner * inner * scenario.N *
                                             scenario.N / (c.k_b * (1.0 - scenario.search.omega));
}

ReductionBounds reduction_bounds(const Scenario& scenario) {
    const PlanningContext c = context(scenario);
    if (scenario.search.kind != SearchModel::Kind::PiecewiseLinear)
        throw std::invalid_argument("reduction_bounds requires the piecewise search model");
    ReductionBounds b;

    const double root_va = std::sqrt(c.v_a * c.x_hat + c.L) * std::sqrt(scenario.phi);
    const double root_l = std::sqrt(c.L) * std::sqrt(c.mu);
    b.l52 = std::pow((root_va - root_l) / (root_va + root_l), 2.0);
    const double rp = std::sqrt(scenario.phi), rm = std::sqrt(c.mu);
    b.l53 = std::pow((rp - rm) / (rp + rm), 2.0);
    const double theta_b = theta_benchmark(scenario.epsilon, scenario.phi);
    b.l54 = c.v_a * c.x_hat * theta_b / (c.L + c.v_a * c.x_hat * theta_b);

    // Exact reductions maximized over a fine penetration grid. The budget
    // follows the benchmark at each penetration, matching the bound setting.
    const int cells = 1999;
    for (int i = 1; i <= cells; ++i) {
        const double eps = static_cast<double>(i) / (cells + 1);
        const double tb = theta_benchmark(eps, scenario.phi);
        const double budget = c.k_b * (c.v_a * tb * c.x_hat + c.L);
        const double t1 = theta_first_best(eps, c.mu, scenario.phi, c.L, c.v_a * c.x_hat);
        const double k1 = budget / (c.v_a * t1 * c.x_hat + c.L);
        const double t2 = theta_second_best(eps, c.mu, scenario.phi);
        const double tc_b = tc_at(scenario, eps, tb, c.k_b);
        const double tc_1 = tc_at(scenario, eps, t1, k1);
        const double tc_2 = tc_at(scenario, eps, t2, c.k_b);
        const double r1 = (tc_b - tc_1) / tc_b;
        const double r2 = (tc_b - tc_2) / tc_b;
        const double r12 = (tc_2 - tc_1) / tc_2;
        if (r1 > b.max_first) { b.max_first = r1; b.eps_max_first = eps; }
        if (r2 > b.max_second) { b.max_second = r2; b.eps_max_second = eps; }
        if (r12 > b.max_gap) { b.max_gap = r12; b.eps_max_gap = eps; }
    }
    return b;
}

BudgetSaving budget_saving(const Scenario& scenario) {
    const PlanningContext c = context(scenario);
    const double theta_b = theta_benchmark(scenario.epsilon, scenario.phi);
    const double theta_2 = theta_second_best(scenario.epsilon, c.mu, scenario.phi);
    BudgetSaving s;
    s.amount = c.k_b * c.v_a * (theta_b - theta_2) * c.x_hat;
    s.fraction = c.budget > 0.0 ? s.amount / c.budget : 0.0;
    return s;
}

SweepResult sweep(const Scenario& scenario, const std::vector<double>& thetas,
                  const std::vector<double>& ks, int threads) {
    if (thetas.empty() || ks.empty())
        throw std::invalid_argument("sweep needs nonempty theta and k grids");
    if (scenario.search.kind != SearchModel::Kind::PiecewiseLinear)
        throw std::invalid_argument("sweep requires the piecewise search model");
    context(scenario);  // planning block must be present
    const bool both_classes = scenario.epsilon > 0.0 && scenario.epsilon < 1.0;
    for (double th : thetas) {
        if (th < 0.0 || th > 1.0)
            throw std::invalid_argument("sweep theta grid must stay within [0, 1]");
        if (both_classes && (th <= 0.0 || th >= 1.0))
            throw std::invalid_argument(
                "sweep theta grid must exclude 0 and 1 when both classes are present");
    }
    for (double kv : ks)
        if (!(kv > 0.0)) throw std::invalid_argument("sweep k grid must be positive");
    SweepResult result;
    result.cells.resize(thetas.size() * ks.size());

    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min<int>(workers, static_cast<int>(thetas.size())));

    auto run_rows = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            for (std::size_t j = 0; j < ks.size(); ++j) {
                Design d{thetas[i], ks[j], Design::Tag::Sweep};
                SweepCell& cell = result.cells[i * ks.size() + j];
                cell.theta = d.theta;
                cell.k = d.k;
                const DesignEval eval = tc_closed_form(scenario, d);
                cell.tc = eval.tc;
                cell.np = eval.np;
                cell.reduction = eval.reduction;
                cell.feasible = eval.feasible();
            }
        }
    };

    if (workers == 1) {
        run_rows(0, thetas.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (thetas.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(thetas.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back(run_rows, begin, end);
        }
        for (auto& t : pool) t.join();
    }

    for (std::size_t idx = 0; idx < result.cells.size(); ++idx) {
        const SweepCell& cell = result.cells[idx];
        if (!cell.feasible) continue;
        if (result.best_index < 0 || cell.tc < result.cells[result.best_index].tc)
            result.best_index = static_cast<std::ptrdiff_t>(idx);
    }
    return result;
}

}  // namespace curbflow
