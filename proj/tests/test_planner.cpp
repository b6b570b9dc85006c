#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "curbflow/cost_model.hpp"
#include "curbflow/planner.hpp"
#include "scenarios.hpp"

using namespace curbflow;

namespace {

Scenario planning_scenario(double theta = 0.25) {
    return curbflow::testing::base_scenario(theta, SearchModel::Kind::PiecewiseLinear);
}

std::vector<double> linspace(double a, double b, int count) {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / (count - 1);
    return v;
}

}  // namespace

TEST_CASE("benchmark design splits area in proportion to space needs") {
    const Scenario s = planning_scenario();
    const BenchmarkDesign b = benchmark_design(s);
    CHECK(b.design.theta == doctest::Approx(8.0 / 23.0).epsilon(1e-12));
    CHECK(b.design.k == 40000.0);
    CHECK(b.budget == doctest::Approx(540000000.0 / 23.0).epsilon(1e-12));

    Scenario hv_only = s;
    hv_only.epsilon = 0.0;
    CHECK(benchmark_design(hv_only).design.theta == 0.0);

    Scenario overridden = s;
    overridden.planning->budget_override = 1e7;
    CHECK(benchmark_design(overridden).budget == 1e7);
}

TEST_CASE("closed-form total cost at the three designs") {
    const Scenario s = planning_scenario();
    const DesignEval bench = tc_closed_form(s, benchmark_design(s).design);
    CHECK(bench.tc == doctest::Approx(61100.0).epsilon(1e-9));
    CHECK(bench.reduction == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(bench.np == doctest::Approx(540000000.0 / 23.0));
    CHECK(bench.feasible());

    const DesignEval first = tc_closed_form(s, first_best(s));
    CHECK(first.tc == doctest::Approx(55473.7).epsilon(2e-5));
    CHECK(first.reduction == doctest::Approx(0.0921).epsilon(2e-3));
    CHECK(first.budget_ok);

    const DesignEval second = tc_closed_form(s, second_best(s));
    CHECK(second.tc == doctest::Approx(57589.5).epsilon(2e-5));
    CHECK(second.reduction == doctest::Approx(0.0575).epsilon(2e-3));
}

TEST_CASE("first-best design matches the frozen values") {
    const Scenario s = planning_scenario();
    const Design d = first_best(s);
    CHECK(d.theta == doctest::Approx(0.1468542).epsilon(1e-5));
    CHECK(d.k == doctest::Approx(43744.5).epsilon(1e-5));

    Scenario av_only = s;
    av_only.epsilon = 1.0;
    CHECK(first_best(av_only).theta == doctest::Approx(1.0));

    // negligible upgrade cost collapses first-best onto second-best
    Scenario free_upgrade = s;
    free_upgrade.planning->v_a = 1e-12;
    CHECK(first_best(free_upgrade).theta ==
          doctest::Approx(second_best(free_upgrade).theta).epsilon(1e-9));
    CHECK(first_best(free_upgrade).k == doctest::Approx(40000.0).epsilon(1e-9));
}

TEST_CASE("second-best design pins the width at the benchmark") {
    const Scenario s = planning_scenario();
    const Design d = second_best(s);
    CHECK(d.theta == doctest::Approx(0.1741124).epsilon(1e-5));
    CHECK(d.k == 40000.0);

    Scenario hv_only = s;
    hv_only.epsilon = 0.0;
    CHECK(second_best(hv_only).theta == 0.0);

    // mu phi = 1 makes the share equal the penetration
    Scenario unit = s;
    unit.lambda_a = unit.lambda_c / unit.phi;
    CHECK(second_best(unit).theta == doctest::Approx(unit.epsilon).epsilon(1e-12));
}

TEST_CASE("minimized-cost identities hold to 1e-9") {
    const Scenario s = planning_scenario();
    const double tc1 = tc_closed_form(s, first_best(s)).tc;
    CHECK(std::abs(tc1 - minimized_tc_first_best(s)) <= 1e-9 * tc1);
    const double tc2 = tc_closed_form(s, second_best(s)).tc;
    CHECK(std::abs(tc2 - minimized_tc_second_best(s)) <= 1e-9 * tc2);
}

TEST_CASE("first-best reduction matches the independent ratio formula") {
    // Independent route: the reduction written as a single rational
    // expression in the model constants.
    const Scenario base = planning_scenario();
    const double phi = base.phi, mu = base.lambda_a / base.lambda_c;
    const double L = 500.0, vax = 250.0, kb = 40000.0;
    for (double eps : {0.1, 0.25, 0.4, 0.61, 0.8, 0.95}) {
        Scenario s = base;
        s.epsilon = eps;
        const double c_eps = planning_constant(s);
        const double theta_b = eps * phi / (eps * phi + 1.0 - eps);
        const double budget = kb * (vax * theta_b + L);
        const double ratio = (vax + L) / L;
        const double num =
            (1.0 - eps) * eps * std::pow(std::sqrt(ratio * phi) - std::sqrt(mu), 2.0) * L;
        const double den = (1.0 - eps + eps * mu) * (1.0 - eps + eps * ratio * phi) * L +
                           (1.0 - s.search.omega) * c_eps * budget / (s.lambda_c * s.N * s.N);
        const double expected = num / den;

        const double tc_b = tc_closed_form(s, benchmark_design(s).design).tc;
        const double tc_1 = tc_closed_form(s, first_best(s)).tc;
        CHECK((tc_b - tc_1) / tc_b == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("reduction bounds and their grid maxima") {
    const ReductionBounds b = reduction_bounds(planning_scenario());
    CHECK(b.l52 == doctest::Approx(0.2621472).epsilon(1e-5));
    CHECK(b.l53 == doctest::Approx(0.1878354).epsilon(1e-5));
    CHECK(b.l54 == doctest::Approx(4.0 / 27.0).epsilon(1e-9));

    CHECK(std::abs(b.max_first - 0.107) <= 0.003);
    CHECK(std::abs(b.eps_max_first - 0.61) <= 0.02);
    CHECK(std::abs(b.max_second - 0.073) <= 0.003);
    CHECK(std::abs(b.eps_max_second - 0.66) <= 0.02);
    CHECK(std::abs(b.max_gap - 0.038) <= 0.003);
    CHECK(std::abs(b.eps_max_gap - 0.51) <= 0.02);

    // the caps hold strictly across the penetration range
    for (int i = 1; i <= 19; ++i) {
        Scenario s = planning_scenario();
        s.epsilon = 0.05 * i;
        const double tc_b = tc_closed_form(s, benchmark_design(s).design).tc;
        const double tc_1 = tc_closed_form(s, first_best(s)).tc;
        const double tc_2 = tc_closed_form(s, second_best(s)).tc;
        CHECK((tc_b - tc_1) / tc_b < b.l52);
        CHECK((tc_b - tc_2) / tc_b < b.l53);
        CHECK((tc_2 - tc_1) / tc_2 <= b.l54 + 1e-12);
    }
}

TEST_CASE("share orderings across the penetration range") {
    for (int i = 1; i <= 19; ++i) {
        Scenario s = planning_scenario();
        s.epsilon = 0.05 * i;
        const double t1 = first_best(s).theta;
        const double t2 = second_best(s).theta;
        const double tb = benchmark_design(s).design.theta;
        CHECK(t1 < t2);
        CHECK(t2 < tb);  // strict since mu < phi and eps in (0,1)
        CHECK(t1 < s.epsilon);
    }
}

TEST_CASE("first-best share responds to parameters as expected") {
    const Scenario s = planning_scenario();
    const double base_theta = first_best(s).theta;

    Scenario wider = s;
    wider.planning->k_b = 55000.0;
    CHECK(first_best(wider).theta == doctest::Approx(base_theta).epsilon(1e-12));

    Scenario costly = s;
    costly.planning->v_a = 80.0;
    CHECK(first_best(costly).theta < base_theta);

    Scenario more_av = s;
    more_av.epsilon = 0.5;
    CHECK(first_best(more_av).theta > base_theta);

    Scenario smaller_spaces = s;
    smaller_spaces.phi = 0.9;
    CHECK(first_best(smaller_spaces).theta > base_theta);

    Scenario dearer_land = s;
    dearer_land.planning->rent.L0 = 300.0;
    CHECK(first_best(dearer_land).theta > base_theta);

    Scenario cheaper_drive = s;
    cheaper_drive.lambda_a = 0.25;  // smaller mu lowers the share
    CHECK(first_best(cheaper_drive).theta < base_theta);
}

TEST_CASE("budget saving of the width-capped optimum") {
    const Scenario s = planning_scenario();
    const BudgetSaving saving = budget_saving(s);
    CHECK(saving.amount == doctest::Approx(1737137.0).epsilon(1e-5));
    CHECK(saving.fraction == doctest::Approx(0.074).epsilon(0.01));

    Scenario free_upgrade = s;
    free_upgrade.planning->v_a = 0.0;
    CHECK(budget_saving(free_upgrade).amount == 0.0);

    Scenario hv_only = s;
    hv_only.epsilon = 0.0;
    CHECK(budget_saving(hv_only).amount == doctest::Approx(0.0));
}

TEST_CASE("sweep flags the budget frontier and finds the optimum cell") {
    const Scenario s = planning_scenario();
    // 200x200 cells (201 sample lines); fine enough that budget-frontier
    // quantization stays below one cell
    const std::vector<double> thetas = linspace(0.02, 0.98, 201);
    const std::vector<double> ks = linspace(5000.0, 60000.0, 201);
    const SweepResult result = sweep(s, thetas, ks, 2);
    REQUIRE(result.cells.size() == 201 * 201);
    REQUIRE(result.best_index >= 0);

    const double budget = planning_budget(s);
    for (const SweepCell& cell : result.cells) {
        const bool in_budget = cell.np <= budget * (1.0 + 1e-12);
        const bool supplied = cell.theta * cell.k / s.phi * 5.0 > s.demand_av() &&
                              (1.0 - cell.theta) * cell.k * 5.0 > s.demand_hv();
        CHECK(cell.feasible == (in_budget && supplied));
    }

    const SweepCell& best = result.cells[result.best_index];
    const Design ref = first_best(s);
    CHECK(std::abs(best.theta - ref.theta) <= (0.98 - 0.02) / 200.0 + 1e-12);
    CHECK(std::abs(best.k - ref.k) <= (60000.0 - 5000.0) / 200.0 + 1e-12);
}

TEST_CASE("sweep containing the benchmark cell reports zero reduction there") {
    const Scenario s = planning_scenario();
    const SweepResult result = sweep(s, {0.2, 8.0 / 23.0, 0.5}, {30000.0, 40000.0}, 1);
    bool found = false;
    for (const SweepCell& cell : result.cells) {
        if (cell.theta == 8.0 / 23.0 && cell.k == 40000.0) {
            CHECK(cell.reduction == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(cell.feasible);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("sweep with every cell over budget reports no feasible optimum") {
    const Scenario s = planning_scenario();
    const SweepResult result = sweep(s, {0.3, 0.4}, {70000.0, 90000.0}, 1);
    CHECK(result.best_index == -1);
    for (const SweepCell& cell : result.cells) CHECK_FALSE(cell.feasible);
}

TEST_CASE("planner rejects unusable configurations") {
    Scenario no_planning = planning_scenario();
    no_planning.planning.reset();
    CHECK_THROWS_AS(benchmark_design(no_planning), ScenarioError);
    CHECK_THROWS_AS(first_best(no_planning), ScenarioError);

    Scenario no_rent = planning_scenario();
    no_rent.planning->rent.L0 = 0.0;
    CHECK_THROWS_AS(first_best(no_rent), ScenarioError);

    const Scenario s = planning_scenario();
    CHECK_THROWS_AS(tc_closed_form(s, Design{0.0, 40000.0, Design::Tag::Sweep}),
                    std::domain_error);
    CHECK_THROWS_AS(tc_closed_form(s, Design{1.0, 40000.0, Design::Tag::Sweep}),
                    std::domain_error);
    CHECK_THROWS_AS(tc_closed_form(curbflow::testing::base_scenario(0.25),
                                   Design{0.25, 40000.0, Design::Tag::Sweep}),
                    std::invalid_argument);

    CHECK_THROWS_AS(sweep(s, {}, {40000.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sweep(s, {0.0, 0.5}, {40000.0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(sweep(s, {0.5}, {-1.0}, 1), std::invalid_argument);
}
