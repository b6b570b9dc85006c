#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace curbflow {

enum class VehicleClass { AV, HV };

inline const char* class_tag(VehicleClass c) { return c == VehicleClass::AV ? "av" : "hv"; }

/// Thrown when a scenario file is malformed or violates a model invariant.
/// `field` names the offending key when known.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string field, const std::string& what)
        : std::runtime_error(what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Parking spot search-time model shared by both vehicle classes.
/// Binomial: S = m/(m-n), unbounded as occupancy -> 1.
/// PiecewiseLinear: slope delta up to occupancy 1-omega, slope Delta beyond.
struct SearchModel {
    enum class Kind { Binomial, PiecewiseLinear };
    Kind kind = Kind::Binomial;
    double delta = 10.0;
    double Delta = 1000.0;
    double omega = 0.2;

    /// Search time of an empty lot (n = 0).
    double s_min() const { return kind == Kind::Binomial ? 1.0 : 0.0; }
};

/// Parking supply along the corridor: total area width k(x) and AV share
/// theta(x) on [0, x_hat]. Per-class space counts are m_a = theta*k/phi,
/// m_c = (1-theta)*k.
struct SupplyProfile {
    enum class Kind { Constant, SigmoidTheta, Tabulated };

    struct Breakpoint {
        double x = 0.0;
        double k = 0.0;
        double theta = 0.0;
    };

    Kind kind = Kind::Constant;
    double x_hat = 0.0;  // supply span [km]

    // Constant / SigmoidTheta share a constant width k.
    double k = 0.0;
    double theta = 0.0;  // Constant only

    // SigmoidTheta: theta(x) = eps_cap / (1 + exp(-steepness*(x - midpoint)))
    double eps_cap = 0.0;
    double steepness = 0.0;
    double midpoint = 0.0;

    // Tabulated: piecewise linear in x, clamped outside the breakpoint range.
    std::vector<Breakpoint> breakpoints;

    double k_at(double x) const;
    double theta_at(double x) const;
    double k_prime_at(double x) const;
    double theta_prime_at(double x) const;
};

/// Per-location supply snapshot.
struct SupplyPoint {
    double k = 0.0;
    double theta = 0.0;
    double m_a = 0.0;
    double m_c = 0.0;
};

struct RentProfile {
    enum class Kind { LinearDecay, Constant };
    Kind kind = Kind::LinearDecay;
    double L0 = 0.0;  // rent per unit area at the CBD

    double at(double x, double x_hat) const {
        if (kind == Kind::Constant) return L0;
        return x_hat > 0.0 ? L0 * (1.0 - x / x_hat) : L0;
    }
};

struct PlanningParams {
    double v_a = 0.0;  // upgrade cost per unit area for AV parking
    RentProfile rent;
    double k_b = 0.0;  // benchmark parking width
    std::optional<double> budget_override;
};

struct Scenario {
    double N = 0.0;        // travellers in the peak
    double epsilon = 0.0;  // AV penetration
    double phi = 1.0;      // AV space size relative to an HV space

    double lambda_c = 0.0, lambda_a = 0.0;  // walk / self-drive cost per km
    double beta_c = 0.0, beta_a = 0.0;      // cruising delay coefficients
    double gamma_c = 0.0, gamma_a = 0.0;    // search-time value

    SearchModel search;
    SupplyProfile supply;
    std::optional<PlanningParams> planning;

    double demand_av() const { return epsilon * N; }
    double demand_hv() const { return (1.0 - epsilon) * N; }
    double demand(VehicleClass c) const { return c == VehicleClass::AV ? demand_av() : demand_hv(); }
    double lambda(VehicleClass c) const { return c == VehicleClass::AV ? lambda_a : lambda_c; }
    double beta(VehicleClass c) const { return c == VehicleClass::AV ? beta_a : beta_c; }
    double gamma(VehicleClass c) const { return c == VehicleClass::AV ? gamma_a : gamma_c; }

    /// Spaces per km available to class c at location x.
    double spaces(VehicleClass c, double x) const;
    /// d(spaces)/dx, analytic for all profile kinds.
    double spaces_prime(VehicleClass c, double x) const;
};

/// Supply snapshot at x. Throws std::out_of_range for x outside [0, x_hat].
SupplyPoint supply_at(const SupplyProfile& profile, double phi, double x);

/// Aggregate land rent L = integral of L(u) du over [0, x_hat], exact for
/// the linear and constant rent shapes.
double aggregate_rent(const PlanningParams& planning, double x_hat);

struct SufficiencyReport {
    double supply_av = 0.0, demand_av = 0.0;
    double supply_hv = 0.0, demand_hv = 0.0;
    bool feasible_av = false, feasible_hv = false;

    double margin_av() const { return supply_av - demand_av; }
    double margin_hv() const { return supply_hv - demand_hv; }
    bool feasible() const { return feasible_av && feasible_hv; }
};

/// Checks the strict supply constraints: integral of m_i over the supply
/// span must exceed N_i for each class. Reports margins, never throws.
SufficiencyReport check_supply_sufficiency(const Scenario& scenario);

/// Parses and validates a scenario from its JSON document text.
Scenario parse_scenario(const std::string& json_text);

/// Loads a scenario file. Throws ScenarioError on parse or validation failure.
Scenario load_scenario(const std::string& path);

/// Validates all scenario invariants; throws ScenarioError naming the field.
/// Warnings (e.g. lambda_c <= lambda_a) go to stderr.
void validate_scenario(const Scenario& scenario);

}  // namespace curbflow
