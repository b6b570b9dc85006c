#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "curbflow/corridor_solver.hpp"
#include "curbflow/cost_model.hpp"
#include "scenarios.hpp"

using namespace curbflow;
using curbflow::testing::base_scenario;

namespace {

/// Builds a synthetic distribution with exactly the requested mass.
SpatialSolution synthetic(VehicleClass vclass, double mass, double span,
                          const std::vector<double>& shape) {
    SpatialSolution s;
    s.vclass = vclass;
    s.mode = SolveMode::Equilibrium;
    const std::size_t count = shape.size();
    s.xs.resize(count);
    s.n = shape;
    for (std::size_t i = 0; i < count; ++i)
        s.xs[i] = span * static_cast<double>(i) / (count - 1);
    const double raw = trapezoid(s.xs, s.n);
    for (double& v : s.n) v *= mass / raw;
    s.span = span;
    return s;
}

std::vector<double> ramp_down(std::size_t count) {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = static_cast<double>(count - 1 - i);
    return v;
}

}  // namespace

TEST_CASE("total cruising cost matches the closed form and its split") {
    const Scenario s = base_scenario();
    CHECK(total_cruising_cost(s) == doctest::Approx(18400.0));
    CHECK(hv_cruising_total(s) == doctest::Approx(0.5 * 1e-4 * 12000.0 * 12000.0));
    CHECK(av_cruising_total(s) + hv_cruising_total(s) == doctest::Approx(total_cruising_cost(s)));

    Scenario hv_only = base_scenario();
    hv_only.epsilon = 0.0;
    CHECK(total_cruising_cost(hv_only) == doctest::Approx(0.5 * 1e-4 * 4e8));
}

TEST_CASE("planning constant evaluates the search and cruising terms") {
    Scenario s = base_scenario(0.5, SearchModel::Kind::PiecewiseLinear);
    CHECK(planning_constant(s) == doctest::Approx(31200.0));

    Scenario av_only = s;
    av_only.epsilon = 1.0;
    CHECK(planning_constant(av_only) ==
          doctest::Approx(0.05 * 10.0 * 0.8 * 20000.0 + 0.5 * 0.5e-4 * 4e8));

    Scenario saturated = s;
    saturated.search.omega = 1.0 - 1e-12;
    CHECK(planning_constant(saturated) == doctest::Approx(18400.0).epsilon(1e-6));

    CHECK_THROWS_AS(planning_constant(base_scenario()), std::invalid_argument);
}

TEST_CASE("cruising cost endpoints follow the model") {
    const Scenario s = base_scenario();
    const SpatialSolution hv = synthetic(VehicleClass::HV, 12000.0, 0.7, ramp_down(401));
    CHECK(cruising_cost(s, hv, hv.span) == doctest::Approx(0.0));
    CHECK(cruising_cost(s, hv, 0.0) == doctest::Approx(1e-4 * 12000.0));

    const SpatialSolution av = synthetic(VehicleClass::AV, 8000.0, 0.5, ramp_down(401));
    CHECK(cruising_cost(s, av, 0.0) == doctest::Approx(1.2));
    CHECK(cruising_cost(s, av, av.span) == doctest::Approx(1.6));
    CHECK_THROWS_AS(cruising_cost(s, av, 0.6), std::out_of_range);
}

TEST_CASE("generalized cost splits add up exactly") {
    const Scenario s = base_scenario();
    // span wide enough that the peak density stays below the HV capacity
    const SpatialSolution hv = synthetic(VehicleClass::HV, 12000.0, 1.6, ramp_down(401));
    for (double x : {0.0, 0.21, 0.5, 1.6}) {
        const CostBreakdown b = generalized_cost(s, hv, x);
        CHECK(b.total == b.access + b.search + b.cruise);
        CHECK(b.access == doctest::Approx(4.0 * x));
    }
    // empty lot at the span edge: only the minimum search time remains
    const CostBreakdown edge = generalized_cost(s, hv, hv.span);
    CHECK(edge.search == doctest::Approx(0.1));
    CHECK(edge.cruise == doctest::Approx(0.0));
}

TEST_CASE("marginal cost drops the cruising term and adds the crowding term") {
    const Scenario s = base_scenario();
    const SpatialSolution hv = synthetic(VehicleClass::HV, 12000.0, 1.6, ramp_down(401));
    // empty location: MP = lambda x + gamma S_min
    CHECK(marginal_cost(s, hv, hv.span) == doctest::Approx(4.0 * 1.6 + 0.1));
    // crowding term is nonnegative: MP >= P - c everywhere
    for (double x : {0.0, 0.1, 0.33, 0.6}) {
        const CostBreakdown b = generalized_cost(s, hv, x);
        CHECK(marginal_cost(s, hv, x) >= b.total - b.cruise - 1e-12);
    }
}

TEST_CASE("marginal cost at the piecewise optimum is flat at lambda times span") {
    Scenario s = base_scenario(0.5, SearchModel::Kind::PiecewiseLinear);
    const SpatialSolution opt = closed_form_llp(s, VehicleClass::HV, SolveMode::Optimum);
    // tail nodes are below the kink; MP there equals the level exactly
    for (std::size_t i = opt.xs.size() - 50; i < opt.xs.size(); ++i)
        CHECK(marginal_cost(s, opt, opt.xs[i]) == doctest::Approx(opt.level).epsilon(1e-9));
}

TEST_CASE("integrated cruising cost is distribution independent") {
    const Scenario s = base_scenario();
    std::vector<SpatialSolution> hv_solutions;
    hv_solutions.push_back(synthetic(VehicleClass::HV, 12000.0, 0.7, ramp_down(801)));
    hv_solutions.push_back(
        synthetic(VehicleClass::HV, 12000.0, 0.9, std::vector<double>(801, 1.0)));
    {
        std::vector<double> bump(801);
        for (std::size_t i = 0; i < bump.size(); ++i) {
            const double t = static_cast<double>(i) / 800.0;
            bump[i] = 0.2 + std::sin(3.14159265358979 * t);
        }
        hv_solutions.push_back(synthetic(VehicleClass::HV, 12000.0, 0.8, bump));
    }
    hv_solutions.push_back(solve_equilibrium(s, VehicleClass::HV));
    hv_solutions.push_back(solve_optimum(s, VehicleClass::HV));

    for (const SpatialSolution& sol : hv_solutions) {
        const std::vector<double> c = cruising_profile(s, sol);
        std::vector<double> integrand(sol.xs.size());
        for (std::size_t i = 0; i < sol.xs.size(); ++i) integrand[i] = sol.n[i] * c[i];
        CHECK(trapezoid(sol.xs, integrand) ==
              doctest::Approx(hv_cruising_total(s)).epsilon(5e-3));
    }

    std::vector<SpatialSolution> av_solutions;
    av_solutions.push_back(synthetic(VehicleClass::AV, 8000.0, 0.5, ramp_down(801)));
    av_solutions.push_back(solve_equilibrium(s, VehicleClass::AV));
    av_solutions.push_back(solve_optimum(s, VehicleClass::AV));
    for (const SpatialSolution& sol : av_solutions) {
        const std::vector<double> c = cruising_profile(s, sol);
        std::vector<double> integrand(sol.xs.size());
        for (std::size_t i = 0; i < sol.xs.size(); ++i) integrand[i] = sol.n[i] * c[i];
        CHECK(trapezoid(sol.xs, integrand) ==
              doctest::Approx(av_cruising_total(s)).epsilon(5e-3));
    }
}
