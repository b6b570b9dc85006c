#pragma once

#include <cstddef>
#include <vector>

#include "curbflow/scenario.hpp"

namespace curbflow {

/// A candidate supply design: constant AV area share and width.
struct Design {
    enum class Tag { Benchmark, FirstBest, SecondBest, Sweep };
    double theta = 0.0;
    double k = 0.0;
    Tag tag = Tag::Sweep;
};

struct DesignEval {
    double tc = 0.0;         // total parking cost at optimal pricing (closed form)
    double np = 0.0;         // infrastructure cost k (v_a theta x_hat + L)
    bool budget_ok = false;  // np within the planning budget
    bool supply_ok = false;  // strict per-class supply sufficiency
    double reduction = 0.0;  // (tc_benchmark - tc) / tc_benchmark

    bool feasible() const { return budget_ok && supply_ok; }
};

struct BenchmarkDesign {
    Design design;
    double budget = 0.0;
};

/// theta^b = eps phi / (eps phi + 1 - eps) with the benchmark width k_b;
/// the budget follows unless the scenario overrides it.
BenchmarkDesign benchmark_design(const Scenario& scenario);

/// NP for a constant design.
double infrastructure_cost(const Scenario& scenario, const Design& design);

/// The planning budget: override when configured, benchmark cost otherwise.
double planning_budget(const Scenario& scenario);

/// Closed-form total parking cost at optimal pricing for a constant design
/// under the piecewise search model. Throws std::domain_error when theta is
/// 0 or 1 while both classes are present.
DesignEval tc_closed_form(const Scenario& scenario, const Design& design);

/// The bare total-cost formula behind tc_closed_form, usable without a
/// planning block: C(eps) + N^2/(k(1-omega)) (lambda_c(1-eps)^2/(1-theta)
/// + phi lambda_a eps^2/theta).
double closed_form_total_cost(const Scenario& scenario, double theta, double k);

/// Budget-constrained optimum with free width.
Design first_best(const Scenario& scenario);

/// Optimum with the width capped at the benchmark k_b.
Design second_best(const Scenario& scenario);

/// Minimized-TC expressions for the two optima in closed form. These are the
/// algebraic counterparts of evaluating tc_closed_form at the optimal design
/// and are kept as an independent identity check.
double minimized_tc_first_best(const Scenario& scenario);
double minimized_tc_second_best(const Scenario& scenario);

struct ReductionBounds {
    double l52 = 0.0;  // cap on (TC^b - TC^o1)/TC^b
    double l53 = 0.0;  // cap on (TC^b - TC^o2)/TC^b
    double l54 = 0.0;  // cap on (TC^o2 - TC^o1)/TC^o2
    // Maxima of the exact reductions over a fine AV-penetration grid.
    double max_first = 0.0, eps_max_first = 0.0;
    double max_second = 0.0, eps_max_second = 0.0;
    double max_gap = 0.0, eps_max_gap = 0.0;
};

ReductionBounds reduction_bounds(const Scenario& scenario);

struct BudgetSaving {
    double amount = 0.0;    // k_b v_a (theta^b - theta^o2) x_hat
    double fraction = 0.0;  // amount / budget
};

BudgetSaving budget_saving(const Scenario& scenario);

struct SweepCell {
    double theta = 0.0, k = 0.0;
    double tc = 0.0, np = 0.0, reduction = 0.0;
    bool feasible = false;
};

struct SweepResult {
    std::vector<SweepCell> cells;    // theta-major order
    std::ptrdiff_t best_index = -1;  // feasible argmin of tc, -1 when none
};

/// Evaluates every (theta, k) cell; cells over budget or with insufficient
/// supply are kept but flagged. `threads` 0 picks the hardware concurrency.
SweepResult sweep(const Scenario& scenario, const std::vector<double>& thetas,
                  const std::vector<double>& ks, int threads = 0);

}  // namespace curbflow
