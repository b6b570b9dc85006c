// curbflow: spatial parking equilibria, optimal pricing, and supply design
// for a mixed AV/HV linear corridor.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "curbflow/corridor_solver.hpp"
#include "curbflow/cost_model.hpp"
#include "curbflow/io.hpp"
#include "curbflow/oracle.hpp"
#include "curbflow/planner.hpp"
#include "curbflow/pricing.hpp"
#include "curbflow/scenario.hpp"
#include "curbflow/verify.hpp"
#include "curbflow/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace curbflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitInfeasible = 3;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

int thread_cap() {
    if (const char* env = std::getenv("CURBFLOW_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // planner picks hardware concurrency
}

std::vector<double> parse_range(const std::string& text, const std::string& flag) {
    double a = 0.0, b = 0.0;
    int count = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%d", &a, &b, &count) != 3 || count < 1)
        throw ScenarioError(flag, flag + " must look like a:b:n with n >= 1");
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i)
        grid[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / (count - 1);
    return grid;
}

json solution_summary(const SpatialSolution& sol) {
    json j;
    j["span"] = sol.span;
    j["level"] = sol.level;
    j["mode"] = mode_tag(sol.mode);
    j["mass_residual"] = sol.diag.mass_residual;
    j["flatness_residual"] = sol.diag.flatness_residual;
    j["shooting_iterations"] = sol.diag.shooting_iterations;
    return j;
}

void apply_search_override(Scenario& sc, const std::string& search) {
    if (search.empty()) return;
    if (search == "binomial") sc.search.kind = SearchModel::Kind::Binomial;
    else if (search == "piecewise") sc.search.kind = SearchModel::Kind::PiecewiseLinear;
    else throw ScenarioError("search", "search override must be binomial or piecewise");
    validate_scenario(sc);
}

int cmd_solve(const std::string& scenario_path, const std::string& mode_name,
              const std::string& search, const std::string& out_dir) {
    Timer timer;
    Scenario sc = load_scenario(scenario_path);
    apply_search_override(sc, search);
    const SolveMode mode =
        mode_name == "optimum" ? SolveMode::Optimum : SolveMode::Equilibrium;

    SpatialSolution av, hv;
    const bool has_av = sc.demand_av() > 0.0;
    const bool has_hv = sc.demand_hv() > 0.0;
    if (has_av) av = solve_llp(sc, VehicleClass::AV, mode);
    if (has_hv) hv = solve_llp(sc, VehicleClass::HV, mode);

    fs::create_directories(out_dir);
    const std::string csv_path = (fs::path(out_dir) / "solution.csv").string();
    const std::string summary_path = (fs::path(out_dir) / "summary.json").string();
    write_solution_csv(csv_path, sc, has_av ? &av : nullptr, has_hv ? &hv : nullptr);

    json summary;
    summary["mode"] = mode_tag(mode);
    if (has_av) summary["av"] = solution_summary(av);
    if (has_hv) summary["hv"] = solution_summary(hv);
    write_text_file(summary_path, summary.dump(2) + "\n");

    RunManifest manifest;
    manifest.command = "solve";
    manifest.scenario_path = scenario_path;
    manifest.parameters = {{"mode", mode_tag(mode)},
                           {"search", search.empty() ? "scenario" : search}};
    manifest.outputs = {csv_path, summary_path};
    manifest.wall_ms = timer.ms();
    manifest.write((fs::path(out_dir) / "manifest.json").string());
    return kExitOk;
}

int cmd_price(const std::string& scenario_path, const std::string& out_dir) {
    Timer timer;
    Scenario sc = load_scenario(scenario_path);
    const SpatialSolution op_a = solve_llp(sc, VehicleClass::AV, SolveMode::Optimum);
    const SpatialSolution op_c = solve_llp(sc, VehicleClass::HV, SolveMode::Optimum);
    const PricingSchedule prices = optimal_prices(sc, op_a, op_c);
    const PricingComparison cmp = unpriced_vs_priced_reduction(sc);

    fs::create_directories(out_dir);
    const std::string csv_path = (fs::path(out_dir) / "pricing.csv").string();
    const std::string summary_path = (fs::path(out_dir) / "summary.json").string();
    write_pricing_csv(csv_path, prices);

    json summary;
    summary["TP_min"] = prices.tp_min;
    summary["TC"] = prices.tc;
    summary["net_revenue"] = prices.net_revenue;
    summary["TP_equilibrium"] = cmp.tp_equilibrium;
    summary["reduction_vs_unpriced"] = cmp.reduction;
    summary["span_av"] = prices.span_av;
    summary["span_hv"] = prices.span_hv;
    write_text_file(summary_path, summary.dump(2) + "\n");

    RunManifest manifest;
    manifest.command = "price";
    manifest.scenario_path = scenario_path;
    manifest.parameters = json::object();
    manifest.outputs = {csv_path, summary_path};
    manifest.wall_ms = timer.ms();
    manifest.write((fs::path(out_dir) / "manifest.json").string());
    return kExitOk;
}

int cmd_design(const std::string& scenario_path, const std::string& which) {
    Scenario sc = load_scenario(scenario_path);
    const BenchmarkDesign bench = benchmark_design(sc);

    Design design;
    if (which == "benchmark") design = bench.design;
    else if (which == "first-best") design = first_best(sc);
    else if (which == "second-best") design = second_best(sc);
    else throw ScenarioError("which", "which must be benchmark, first-best or second-best");

    const DesignEval eval = tc_closed_form(sc, design);
    const ReductionBounds bounds = reduction_bounds(sc);
    const BudgetSaving saving = budget_saving(sc);

    json out;
    out["which"] = which;
    out["theta"] = design.theta;
    out["k"] = design.k;
    out["TC"] = eval.tc;
    out["NP"] = eval.np;
    out["reduction"] = eval.reduction;
    out["budget"] = bench.budget;
    out["bounds"] = {{"l52", bounds.l52}, {"l53", bounds.l53}, {"l54", bounds.l54}};
    out["budget_saving"] = saving.amount;
    out["budget_saving_fraction"] = saving.fraction;
    std::cout << out.dump(2) << '\n';
    return kExitOk;
}

int cmd_sweep(const std::string& scenario_path, const std::string& theta_range,
              const std::string& k_range, const std::string& out_file) {
    Timer timer;
    Scenario sc = load_scenario(scenario_path);
    const std::vector<double> thetas = parse_range(theta_range, "--theta");
    const std::vector<double> ks = parse_range(k_range, "--k");
    const SweepResult result = sweep(sc, thetas, ks, thread_cap());
    if (fs::path(out_file).has_parent_path())
        fs::create_directories(fs::path(out_file).parent_path());
    write_sweep_csv(out_file, result);

    json out;
    if (result.best_index >= 0) {
        const SweepCell& best = result.cells[result.best_index];
        out["best"] = {{"theta", best.theta},
                       {"k", best.k},
                       {"TC", best.tc},
                       {"reduction", best.reduction}};
    } else {
        out["best"] = nullptr;
    }
    std::cout << out.dump(2) << '\n';

    RunManifest manifest;
    manifest.command = "sweep";
    manifest.scenario_path = scenario_path;
    manifest.parameters = {{"theta", theta_range}, {"k", k_range}};
    manifest.outputs = {out_file};
    manifest.wall_ms = timer.ms();
    manifest.write(out_file + ".manifest.json");
    return kExitOk;
}

int cmd_verify(const std::string& scenario_path, int bins, const std::string& out_json) {
    Timer timer;
    Scenario sc = load_scenario(scenario_path);
    const VerificationReport report = run_verification(sc, bins);
    std::cout << report.to_text();
    if (!out_json.empty()) {
        write_text_file(out_json, report.to_json().dump(2) + "\n");
        RunManifest manifest;
        manifest.command = "verify";
        manifest.scenario_path = scenario_path;
        manifest.parameters = {{"bins", bins}};
        manifest.outputs = {out_json};
        manifest.wall_ms = timer.ms();
        manifest.write(out_json + ".manifest.json");
    }
    return report.all_pass() ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"corridor parking equilibria, pricing, and supply design"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string scenario_path, out_dir, out_file, mode = "equilibrium", search, which;
    std::string theta_range, k_range, verify_json;
    int bins = 2000;

    CLI::App* solve = app.add_subcommand("solve", "solve the spatial distribution per class");
    solve->add_option("--scenario", scenario_path)->required();
    solve->add_option("--mode", mode)->check(CLI::IsMember({"equilibrium", "optimum"}));
    solve->add_option("--search", search)->check(CLI::IsMember({"binomial", "piecewise"}));
    solve->add_option("--out", out_dir)->required();

    CLI::App* price = app.add_subcommand("price", "optimal differentiated prices at the optimum");
    price->add_option("--scenario", scenario_path)->required();
    price->add_option("--out", out_dir)->required();

    CLI::App* design = app.add_subcommand("design", "benchmark / first-best / second-best design");
    design->add_option("--scenario", scenario_path)->required();
    design->add_option("--which", which)
        ->required()
        ->check(CLI::IsMember({"benchmark", "first-best", "second-best"}));

    CLI::App* swp = app.add_subcommand("sweep", "evaluate a (theta, k) design grid");
    swp->add_option("--scenario", scenario_path)->required();
    swp->add_option("--theta", theta_range)->required();
    swp->add_option("--k", k_range)->required();
    swp->add_option("--out", out_file)->required();

    CLI::App* verify = app.add_subcommand("verify", "run the verification battery");
    verify->add_option("--scenario", scenario_path)->required();
    verify->add_option("--bins", bins);
    verify->add_option("--out", verify_json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (solve->parsed()) return cmd_solve(scenario_path, mode, search, out_dir);
        if (price->parsed()) return cmd_price(scenario_path, out_dir);
        if (design->parsed()) return cmd_design(scenario_path, which);
        if (swp->parsed()) return cmd_sweep(scenario_path, theta_range, k_range, out_file);
        if (verify->parsed()) return cmd_verify(scenario_path, bins, verify_json);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (e.kind() == SolverError::Kind::InfeasibleSupply) {
            std::cerr << "max attainable mass: " << e.max_attainable_mass() << '\n';
            return kExitInfeasible;
        }
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
    return kExitConfig;
}
