#include "curbflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace curbflow {

namespace {

using nlohmann::json;

// Grid used to bound sup-type quantities on profiles with no closed-form sup.
constexpr int kProfileSamples = 2001;

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ScenarioError(key, "missing required key '" + key + "'");
    if (!j.at(key).is_number()) throw ScenarioError(key, "key '" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::string require_string(const json& j, const std::string& key) {
    if (!j.contains(key)) throw ScenarioError(key, "missing required key '" + key + "'");
    if (!j.at(key).is_string()) throw ScenarioError(key, "key '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

SearchModel parse_search(const json& j) {
    SearchModel model;
    const std::string type = require_string(j, "type");
    if (type == "binomial") {
        model.kind = SearchModel::Kind::Binomial;
    } else if (type == "piecewise") {
        model.kind = SearchModel::Kind::PiecewiseLinear;
    } else {
        throw ScenarioError("search.type", "unknown search type '" + type + "'");
    }
    if (j.contains("delta")) model.delta = require_number(j, "delta");
    if (j.contains("Delta")) model.Delta = require_number(j, "Delta");
    if (j.contains("omega")) model.omega = require_number(j, "omega");
    return model;
}

SupplyProfile parse_supply(const json& j) {
    SupplyProfile supply;
    const std::string type = require_string(j, "type");
    supply.x_hat = require_number(j, "x_hat");
    if (type == "constant") {
        supply.kind = SupplyProfile::Kind::Constant;
        supply.k = require_number(j, "k");
        supply.theta = require_number(j, "theta");
    } else if (type == "sigmoid") {
        supply.kind = SupplyProfile::Kind::SigmoidTheta;
        supply.k = require_number(j, "k");
        supply.eps_cap = require_number(j, "eps_cap");
        supply.steepness = require_number(j, "steepness");
        supply.midpoint = require_number(j, "midpoint");
    } else if (type == "tabulated") {
        supply.kind = SupplyProfile::Kind::Tabulated;
        if (!j.contains("breakpoints") || !j.at("breakpoints").is_array())
            throw ScenarioError("supply.breakpoints", "tabulated supply needs a 'breakpoints' array");
        for (const auto& row : j.at("breakpoints")) {
            if (!row.is_array() || row.size() != 3)
                throw ScenarioError("supply.breakpoints", "each breakpoint must be [x, k, theta]");
            SupplyProfile::Breakpoint bp;
            bp.x = row[0].get<double>();
            bp.k = row[1].get<double>();
            bp.theta = row[2].get<double>();
            supply.breakpoints.push_back(bp);
        }
        if (supply.breakpoints.empty())
            throw ScenarioError("supply.breakpoints", "tabulated supply needs at least one breakpoint");
        std::sort(supply.breakpoints.begin(), supply.breakpoints.end(),
                  [](const auto& a, const auto& b) { return a.x < b.x; });
    } else {
        throw ScenarioError("supply.type", "unknown supply type '" + type + "'");
    }
    return supply;
}

PlanningParams parse_planning(const json& j) {
    PlanningParams planning;
    planning.v_a = require_number(j, "v_a");
    planning.k_b = require_number(j, "k_b");
    if (!j.contains("rent") || !j.at("rent").is_object())
        throw ScenarioError("planning.rent", "planning needs a 'rent' object");
    const json& rent = j.at("rent");
    const std::string type = require_string(rent, "type");
    if (type == "linear") {
        planning.rent.kind = RentProfile::Kind::LinearDecay;
    } else if (type == "constant") {
        planning.rent.kind = RentProfile::Kind::Constant;
    } else {
        throw ScenarioError("planning.rent.type", "unknown rent type '" + type + "'");
    }
    planning.rent.L0 = require_number(rent, "L0");
    if (j.contains("budget")) planning.budget_override = require_number(j, "budget");
    return planning;
}

double profile_sup(const SupplyProfile& supply, double phi,
                   double (*pick)(const SupplyPoint&)) {
    double best = -1.0;
    for (int i = 0; i < kProfileSamples; ++i) {
        const double x = supply.x_hat * static_cast<double>(i) / (kProfileSamples - 1);
        best = std::max(best, pick(supply_at(supply, phi, x)));
    }
    return best;
}

}  // namespace

double SupplyProfile::k_at(double x) const {
    switch (kind) {
        case Kind::Constant:
        case Kind::SigmoidTheta:
            return k;
        case Kind::Tabulated: {
            if (x <= breakpoints.front().x) return breakpoints.front().k;
            if (x >= breakpoints.back().x) return breakpoints.back().k;
            for (std::size_t i = 1; i < breakpoints.size(); ++i) {
                if (x <= breakpoints[i].x) {
                    const auto& lo = breakpoints[i - 1];
                    const auto& hi = breakpoints[i];
                    const double t = (x - lo.x) / (hi.x - lo.x);
                    return lo.k + t * (hi.k - lo.k);
                }
            }
            return breakpoints.back().k;
        }
    }
    return 0.0;
}

double SupplyProfile::theta_at(double x) const {
    switch (kind) {
        case Kind::Constant:
            return theta;
        case Kind::SigmoidTheta:
            return eps_cap / (1.0 + std::exp(-steepness * (x - midpoint)));
        case Kind::Tabulated: {
            if (x <= breakpoints.front().x) return breakpoints.front().theta;
            if (x >= breakpoints.back().x) return breakpoints.back().theta;
            for (std::size_t i = 1; i < breakpoints.size(); ++i) {
                if (x <= breakpoints[i].x) {
                    const auto& lo = breakpoints[i - 1];
                    const auto& hi = breakpoints[i];
                    const double t = (x - lo.x) / (hi.x - lo.x);
                    return lo.theta + t * (hi.theta - lo.theta);
                }
            }
            return breakpoints.back().theta;
        }
    }
    return 0.0;
}

double SupplyProfile::k_prime_at(double x) const {
    if (kind != Kind::Tabulated) return 0.0;
    if (x <= breakpoints.front().x || x >= breakpoints.back().x) return 0.0;
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (x <= breakpoints[i].x) {
            const auto& lo = breakpoints[i - 1];
            const auto& hi = breakpoints[i];
            return (hi.k - lo.k) / (hi.x - lo.x);
        }
    }
    return 0.0;
}

double SupplyProfile::theta_prime_at(double x) const {
    switch (kind) {
        case Kind::Constant:
            return 0.0;
        case Kind::SigmoidTheta: {
            const double e = std::exp(-steepness * (x - midpoint));
            const double denom = (1.0 + e) * (1.0 + e);
            return eps_cap * steepness * e / denom;
        }
        case Kind::Tabulated: {
            if (x <= breakpoints.front().x || x >= breakpoints.back().x) return 0.0;
            for (std::size_t i = 1; i < breakpoints.size(); ++i) {
                if (x <= breakpoints[i].x) {
                    const auto& lo = breakpoints[i - 1];
                    const auto& hi = breakpoints[i];
                    return (hi.theta - lo.theta) / (hi.x - lo.x);
                }
            }
            return 0.0;
        }
    }
    return 0.0;
}

double Scenario::spaces(VehicleClass c, double x) const {
    const double k = supply.k_at(x);
    const double th = supply.theta_at(x);
    return c == VehicleClass::AV ? th * k / phi : (1.0 - th) * k;
}

double Scenario::spaces_prime(VehicleClass c, double x) const {
    const double k = supply.k_at(x);
    const double th = supply.theta_at(x);
    const double kp = supply.k_prime_at(x);
    const double thp = supply.theta_prime_at(x);
    if (c == VehicleClass::AV) return (thp * k + th * kp) / phi;
    return -thp * k + (1.0 - th) * kp;
}

SupplyPoint supply_at(const SupplyProfile& profile, double phi, double x) {
    if (x < 0.0 || x > profile.x_hat)
        throw std::out_of_range("location outside the supply span [0, x_hat]");
    SupplyPoint p;
    p.k = profile.k_at(x);
    p.theta = profile.theta_at(x);
    p.m_a = p.theta * p.k / phi;
    p.m_c = (1.0 - p.theta) * p.k;
    return p;
}

double aggregate_rent(const PlanningParams& planning, double x_hat) {
    if (planning.rent.kind == RentProfile::Kind::Constant) return planning.rent.L0 * x_hat;
    return 0.5 * planning.rent.L0 * x_hat;  // triangle under L0*(1 - x/x_hat)
}

SufficiencyReport check_supply_sufficiency(const Scenario& scenario) {
    SufficiencyReport report;
    report.demand_av = scenario.demand_av();
    report.demand_hv = scenario.demand_hv();
    // Trapezoid over the sampling grid; exact for constant and piecewise
    // linear widths, adequate for the sigmoid share.
    const double x_hat = scenario.supply.x_hat;
    double sum_a = 0.0, sum_c = 0.0;
    const int n = kProfileSamples;
    const double h = x_hat / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double x = i * h;
        const SupplyPoint p = supply_at(scenario.supply, scenario.phi, x);
        const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
        sum_a += w * p.m_a;
        sum_c += w * p.m_c;
    }
    report.supply_av = sum_a * h;
    report.supply_hv = sum_c * h;
    report.feasible_av = report.supply_av > report.demand_av;
    report.feasible_hv = report.supply_hv > report.demand_hv;
    return report;
}

void validate_scenario(const Scenario& s) {
    if (!(s.N > 0.0)) throw ScenarioError("N", "N must be positive");
    if (s.epsilon < 0.0 || s.epsilon > 1.0)
        throw ScenarioError("epsilon", "epsilon must lie in [0, 1]");
    if (!(s.phi > 0.0) || s.phi > 1.0) throw ScenarioError("phi", "phi must lie in (0, 1]");
    if (!(s.lambda_c > 0.0)) throw ScenarioError("lambda_c", "lambda_c must be positive");
    if (!(s.lambda_a > 0.0)) throw ScenarioError("lambda_a", "lambda_a must be positive");
    if (s.beta_c < 0.0) throw ScenarioError("beta_c", "beta_c must be nonnegative");
    if (s.beta_a < 0.0) throw ScenarioError("beta_a", "beta_a must be nonnegative");
    if (s.beta_a > s.beta_c) throw ScenarioError("beta_a", "beta_a must not exceed beta_c");
    if (!(s.gamma_a > 0.0)) throw ScenarioError("gamma_a", "gamma_a must be positive");
    if (s.gamma_a > s.gamma_c) throw ScenarioError("gamma_a", "gamma_a must not exceed gamma_c");
    if (s.lambda_c <= s.lambda_a)
        std::cerr << "warning: lambda_c <= lambda_a; walking is expected to cost more than self-driving\n";

    // The piecewise parameters ride along even under the binomial model (a
    // search override can switch kinds later), so their ranges always hold.
    if (!(s.search.delta > 0.0)) throw ScenarioError("search.delta", "delta must be positive");
    if (!(s.search.Delta > 0.0)) throw ScenarioError("search.Delta", "Delta must be positive");
    if (s.search.omega <= 0.0 || s.search.omega >= 1.0)
        throw ScenarioError("search.omega", "omega must lie in (0, 1)");

    if (!(s.supply.x_hat > 0.0)) throw ScenarioError("supply.x_hat", "x_hat must be positive");
    for (int i = 0; i < kProfileSamples; ++i) {
        const double x = s.supply.x_hat * static_cast<double>(i) / (kProfileSamples - 1);
        const double k = s.supply.k_at(x);
        const double th = s.supply.theta_at(x);
        if (!(k > 0.0)) throw ScenarioError("supply.k", "k(x) must be positive on [0, x_hat]");
        if (th < 0.0 || th > 1.0)
            throw ScenarioError("supply.theta", "theta(x) must lie in [0, 1] on [0, x_hat]");
    }

    // Outward-parking condition for HVs: lambda_c must dominate the largest
    // cruising externality any feasible HV density can produce, which is
    // bounded by the HV space count, not the raw width.
    const double m_c_max =
        profile_sup(s.supply, s.phi, [](const SupplyPoint& p) { return p.m_c; });
    if (m_c_max > 0.0 && s.beta_c >= s.lambda_c / m_c_max)
        throw ScenarioError("beta_c",
                            "beta_c too large: lambda_c must exceed beta_c * sup m_c(x), "
                            "otherwise HVs prefer parking outward");

    if (s.planning) {
        if (s.planning->v_a < 0.0) throw ScenarioError("planning.v_a", "v_a must be nonnegative");
        if (!(s.planning->k_b > 0.0)) throw ScenarioError("planning.k_b", "k_b must be positive");
        if (s.planning->rent.L0 < 0.0)
            throw ScenarioError("planning.rent.L0", "rent must be nonnegative");
    }
}

Scenario parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError("", std::string("scenario is not valid JSON: ") + e.what());
    }
    Scenario s;
    s.N = require_number(j, "N");
    s.epsilon = require_number(j, "epsilon");
    s.phi = require_number(j, "phi");
    s.lambda_c = require_number(j, "lambda_c");
    s.lambda_a = require_number(j, "lambda_a");
    s.beta_c = require_number(j, "beta_c");
    s.beta_a = require_number(j, "beta_a");
    s.gamma_c = require_number(j, "gamma_c");
    s.gamma_a = require_number(j, "gamma_a");
    if (!j.contains("search") || !j.at("search").is_object())
        throw ScenarioError("search", "missing 'search' object");
    s.search = parse_search(j.at("search"));
    if (!j.contains("supply") || !j.at("supply").is_object())
        throw ScenarioError("supply", "missing 'supply' object");
    s.supply = parse_supply(j.at("supply"));
    if (j.contains("planning")) s.planning = parse_planning(j.at("planning"));
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("", "cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace curbflow
