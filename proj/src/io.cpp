#include "curbflow/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "curbflow/cost_model.hpp"
#include "curbflow/search_time.hpp"
#include "curbflow/version.hpp"

namespace curbflow {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write to '" + path + "'");
    return out;
}

struct ClassColumns {
    std::vector<double> cruise;  // on the solution grid
    const SpatialSolution* sol = nullptr;
};

/// Row values for one class at x: density, search time, cruising, total cost.
/// Beyond the span the lot is empty: n = 0 and the cruising term saturates.
void class_values(const Scenario& sc, const ClassColumns& cc, double x, double& n, double& s,
                  double& c, double& p) {
    const SpatialSolution& sol = *cc.sol;
    const double m = sc.spaces(sol.vclass, x);
    if (x <= sol.span && sol.xs.size() > 1) {
        n = sol.density_at(x);
        // Interpolate the cruising profile on the solution grid.
        const auto& xs = sol.xs;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t hi = it == xs.end() ? xs.size() - 1 : static_cast<std::size_t>(it - xs.begin());
        if (hi == 0) hi = 1;
        const std::size_t lo = hi - 1;
        const double dx = xs[hi] - xs[lo];
        const double t = dx > 0.0 ? (x - xs[lo]) / dx : 0.0;
        c = cc.cruise[lo] + t * (cc.cruise[hi] - cc.cruise[lo]);
    } else {
        n = 0.0;
        c = sol.vclass == VehicleClass::HV
                ? 0.0
                : sc.beta_c * sc.demand_hv() + sc.beta_a * sc.demand_av();
    }
    const double cap = sc.search.kind == SearchModel::Kind::Binomial ? m * (1.0 - 1e-9) : m;
    s = search_time(sc.search, std::clamp(n, 0.0, cap), m);
    p = sc.lambda(sol.vclass) * x + sc.gamma(sol.vclass) * s + c;
}

}  // namespace

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_solution_csv(const std::string& path, const Scenario& scenario,
                        const SpatialSolution* av, const SpatialSolution* hv) {
    std::ofstream out = open_out(path);
    out << "x,n_a,n_c,S_a,S_c,c_a,c_c,P_a,P_c\n";

    std::vector<double> xs;
    ClassColumns col_a, col_c;
    if (av) {
        col_a.sol = av;
        col_a.cruise = cruising_profile(scenario, *av);
        xs.insert(xs.end(), av->xs.begin(), av->xs.end());
    }
    if (hv) {
        col_c.sol = hv;
        col_c.cruise = cruising_profile(scenario, *hv);
        xs.insert(xs.end(), hv->xs.begin(), hv->xs.end());
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    for (double x : xs) {
        out << format_number(x);
        double n_a = 0, s_a = 0, c_a = 0, p_a = 0;
        double n_c = 0, s_c = 0, c_c = 0, p_c = 0;
        if (av) class_values(scenario, col_a, x, n_a, s_a, c_a, p_a);
        if (hv) class_values(scenario, col_c, x, n_c, s_c, c_c, p_c);
        auto cell = [&](bool have, double v) {
            out << ',';
            if (have) out << format_number(v);
        };
        cell(av != nullptr, n_a);
        cell(hv != nullptr, n_c);
        cell(av != nullptr, s_a);
        cell(hv != nullptr, s_c);
        cell(av != nullptr, c_a);
        cell(hv != nullptr, c_c);
        cell(av != nullptr, p_a);
        cell(hv != nullptr, p_c);
        out << '\n';
    }
}

void write_pricing_csv(const std::string& path, const PricingSchedule& schedule) {
    std::ofstream out = open_out(path);
    out << "x,tau_a,tau_c\n";
    for (std::size_t i = 0; i < schedule.xs.size(); ++i) {
        out << format_number(schedule.xs[i]) << ',' << format_number(schedule.tau_a[i]) << ','
            << format_number(schedule.tau_c[i]) << '\n';
    }
}

void write_sweep_csv(const std::string& path, const SweepResult& result) {
    std::ofstream out = open_out(path);
    out << "theta,k,TC,NP,feasible,reduction\n";
    for (const SweepCell& cell : result.cells) {
        out << format_number(cell.theta) << ',' << format_number(cell.k) << ','
            << format_number(cell.tc) << ',' << format_number(cell.np) << ','
            << (cell.feasible ? 1 : 0) << ',' << format_number(cell.reduction) << '\n';
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out = open_out(path);
    out << content;
}

void RunManifest::write(const std::string& path) const {
    nlohmann::json j;
    j["command"] = command;
    j["scenario"] = scenario_path;
    j["parameters"] = parameters;
    j["tool_version"] = kVersion;
    j["outputs"] = outputs;
    j["wall_ms"] = wall_ms;
    std::ofstream out = open_out(path);
    out << j.dump(2) << '\n';
}

}  // namespace curbflow
