#include "csma/bounds.hpp"
#include "csma/equilibrium.hpp"
#include "csma/scenario.hpp"
#include "csma/sim.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace csma;

namespace {

// exit codes: 1 invalid input, 2 infeasible scenario, 3 internal invariant
constexpr int kExitInvalid = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitInternal = 3;

void emit_error(const std::string& type, const std::string& message) {
    json err = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

std::string resolve_scenario(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) return path;
    if (const char* dir = std::getenv("CSMA_SCENARIO_DIR")) {
        fs::path alt = fs::path(dir) / path;
        if (fs::exists(alt)) return alt.string();
    }
    return path;
}

RequestVector parse_p(const std::string& spec, int n) {
    std::vector<double> vals;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
    if (static_cast<int>(vals.size()) != n)
        throw Error("p has " + std::to_string(vals.size()) +
                    " entries, scenario has " + std::to_string(n) + " nodes");
    RequestVector p = RequestVector::Zero(n);
    for (int i = 0; i < n; ++i) {
        if (vals[i] < 0.0 || vals[i] > 1.0)
            throw Error("request probabilities must lie in [0,1]");
        p[i] = vals[i];
    }
    return p;
}

void print_csv_row(const std::vector<std::string>& header,
                   const std::vector<double>& row) {
    for (size_t i = 0; i < header.size(); ++i)
        std::cout << header[i] << (i + 1 < header.size() ? "," : "\n");
    std::cout.precision(17);
    for (size_t i = 0; i < row.size(); ++i)
        std::cout << row[i] << (i + 1 < row.size() ? "," : "\n");
}

json equilibrium_to_json(const Equilibrium& eq) {
    return {{"p", to_json(eq.p)},
            {"branch",
             eq.branch == Equilibrium::Branch::Better ? "better" : "worse"},
            {"residual", eq.residual},
            {"sum_p", eq.sum_p}};
}

struct Options {
    std::string scenario_path;
    std::string format = "json";
    std::string p_spec;
    double tol = 1e-9;
    std::uint64_t seed = 0;
    bool want_worse = false;
    bool compare = false;
};

int cmd_grant(const Options& opt) {
    auto [params, profiles] = load_scenario(resolve_scenario(opt.scenario_path));
    validate(params, profiles);
    RequestVector p = parse_p(opt.p_spec, params.n);
    GrantVector g = grant_probabilities(p, params);
    if (opt.format == "csv") {
        std::vector<std::string> header;
        std::vector<double> row;
        for (int i = 0; i < params.n; ++i) {
            header.push_back("g" + std::to_string(i));
            row.push_back(g[i]);
        }
        print_csv_row(header, row);
    } else {
        std::cout << json{{"grants", to_json(g)}}.dump(2) << "\n";
    }
    return 0;
}

int cmd_perf(const Options& opt) {
    auto [params, profiles] = load_scenario(resolve_scenario(opt.scenario_path));
    validate(params, profiles);
    RequestVector p = parse_p(opt.p_spec, params.n);
    Performance perf = performance(p, params, profiles);
    if (opt.format == "csv") {
        std::vector<std::string> header;
        std::vector<double> row;
        for (int i = 0; i < params.n; ++i) {
            header.push_back("r" + std::to_string(i));
            row.push_back(perf.throughput[i]);
        }
        for (int i = 0; i < params.n; ++i) {
            header.push_back("s" + std::to_string(i));
            row.push_back(perf.power[i]);
        }
        header.push_back("cycle_data_fraction");
        row.push_back(perf.cycle_data_fraction);
        print_csv_row(header, row);
    } else {
        std::cout << json{{"throughput", to_json(perf.throughput)},
                          {"power", to_json(perf.power)},
                          {"cycle_data_fraction", perf.cycle_data_fraction}}
                         .dump(2)
                  << "\n";
    }
    return 0;
}

int cmd_solve(const Options& opt) {
    auto [params, profiles] = load_scenario(resolve_scenario(opt.scenario_path));
    FeasibilityVerdict v = solve(params, profiles, opt.want_worse);
    if (!v.feasible) {
        emit_error("Infeasible", "no equilibrium for the given demands");
        return kExitInfeasible;
    }
    json out = {{"better", equilibrium_to_json(*v.better)},
                {"margin", v.margin}};
    out["better"]["power"] =
        to_json(power_at_equilibrium(v.better->p, params, profiles, opt.tol));
    if (v.worse) {
        out["worse"] = equilibrium_to_json(*v.worse);
        out["worse"]["power"] =
            to_json(power_at_equilibrium(v.worse->p, params, profiles, opt.tol));
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_feasible(const Options& opt) {
    auto [params, profiles] = load_scenario(resolve_scenario(opt.scenario_path));
    FeasibilityVerdict v = solve(params, profiles, opt.want_worse);
    json out = {{"feasible", v.feasible}, {"margin", v.margin}};
    if (v.better) out["better"] = equilibrium_to_json(*v.better);
    if (v.worse) out["worse"] = equilibrium_to_json(*v.worse);
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_bound(const Options& opt, double beta_override) {
    auto [params, profiles] = load_scenario(resolve_scenario(opt.scenario_path));
    if (beta_override > 0.0) params.rts_len = beta_override * params.t0;
    BoundReport rep = power_bound(params, profiles);
    const char* regime = rep.regime == BoundReport::Regime::Low    ? "low"
                         : rep.regime == BoundReport::Regime::Mid ? "mid"
                                                                  : "high";
    json out = {{"regime", regime},
                {"threshold_low", rep.threshold_low},
                {"threshold_high", rep.threshold_high},
                {"bound", rep.bound}};
    if (rep.extremal_p.size() > 0) {
        out["extremal_p"] = to_json(rep.extremal_p);
        out["tightness"] = bound_tightness_check(params, profiles);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_zeta(const Options& opt, int imin, int imax) {
    if (opt.format == "csv") {
        std::cout << "i,zeta\n";
        std::cout.precision(12);
        for (int i = imin; i <= imax; ++i)
            std::cout << i << "," << zeta_search(i, opt.tol).zeta << "\n";
    } else {
        json rows = json::array();
        for (int i = imin; i <= imax; ++i) {
            ZetaResult z = zeta_search(i, opt.tol);
            rows.push_back({{"i", z.i},
                            {"zeta", z.zeta},
                            {"sign_change", z.sign_change}});
        }
        std::cout << json{{"zeta", rows}}.dump(2) << "\n";
    }
    return 0;
}

int cmd_lemma1(int n, double b, double C, int grid) {
    Lemma1Extrema ex = lemma1_oracle(n, b, C, grid);
    std::cout << json{{"min", ex.min},
                      {"max", ex.max},
                      {"argmin", to_json(ex.argmin)},
                      {"argmax", to_json(ex.argmax)}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_simulate(const Options& opt, double handshakes, std::int64_t slots,
                 int replications) {
    auto [params, profiles] = load_scenario(resolve_scenario(opt.scenario_path));
    FeasibilityVerdict v = solve(params, profiles);
    if (!v.feasible) {
        emit_error("Infeasible", "no equilibrium for the given demands");
        return kExitInfeasible;
    }
    RequestVector p = v.better->p;

    SimConfig cfg;
    cfg.seed = opt.seed;
    cfg.replications = replications;
    if (slots > 0) {
        cfg.slots = slots;
    } else {
        // size the horizon so each replication sees its share of the
        // requested handshake count
        Performance perf = performance(p, params, profiles);
        double cycle = params.t0 / (1.0 - perf.cycle_data_fraction);
        cfg.slots = static_cast<std::int64_t>(
            std::ceil(handshakes / replications * cycle) + params.t0);
    }

    SimReport rep = simulate(params, profiles, p, cfg);
    json out = sim_report_to_json(rep);
    out["p"] = to_json(p);
    out["seed"] = opt.seed;
    if (opt.compare) {
        Performance perf = performance(p, params, profiles);
        GrantVector g = grant_probabilities(p, params);
        auto z_scores = [&](const Vector& emp, const Vector& ana,
                            const Vector& se) {
            Vector z = Vector::Zero(params.n);
            for (int i = 0; i < params.n; ++i)
                z[i] = se[i] > 0.0 ? (emp[i] - ana[i]) / se[i] : 0.0;
            return z;
        };
        out["analytic"] = {{"grants", to_json(g)},
                           {"throughput", to_json(perf.throughput)},
                           {"power", to_json(perf.power)}};
        out["z"] = {{"grants", to_json(z_scores(rep.grants, g, rep.grants_stderr))},
                    {"throughput",
                     to_json(z_scores(rep.throughput, perf.throughput,
                                      rep.throughput_stderr))},
                    {"power",
                     to_json(z_scores(rep.power, perf.power, rep.power_stderr))}};
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

// CSV columns: value, feasible, sum_p, then p_i, r_i, s_i by node index.
int cmd_sweep(const Options& opt, const std::string& var, double from,
              double to, int steps) {
    auto [params0, profiles0] = load_scenario(resolve_scenario(opt.scenario_path));
    std::cout << var << ",feasible,sum_p";
    for (int i = 0; i < params0.n; ++i) std::cout << ",p" << i;
    for (int i = 0; i < params0.n; ++i) std::cout << ",r" << i;
    for (int i = 0; i < params0.n; ++i) std::cout << ",s" << i;
    std::cout << "\n";
    std::cout.precision(12);

    for (int k = 0; k < steps; ++k) {
        double value = steps == 1 ? from
                                  : from + (to - from) * k / (steps - 1);
        SystemParams params = params0;
        std::vector<NodeProfile> profiles = profiles0;
        if (var == "beta") {
            params.rts_len = value * params.t0;
        } else if (var == "b") {
            params.b = value;
        } else if (var == "demand_scale") {
            for (auto& np : profiles) np.demand *= value;
        } else if (var == "M") {
            for (auto& np : profiles)
                np.period = static_cast<int>(std::lround(value)) * params.t0;
        } else {
            throw Error("unknown sweep variable: " + var);
        }
        bool feasible = false;
        double sum_p = 0.0;
        RequestVector p = RequestVector::Zero(params.n);
        Vector r = Vector::Zero(params.n), s = Vector::Zero(params.n);
        try {
            FeasibilityVerdict v = solve(params, profiles);
            if (v.feasible) {
                feasible = true;
                p = v.better->p;
                sum_p = v.better->sum_p;
                Performance perf = performance(p, params, profiles);
                r = perf.throughput;
                s = perf.power;
            }
        } catch (const InfeasibleLoad&) {
        }
        std::cout << value << "," << (feasible ? 1 : 0) << "," << sum_p;
        for (int i = 0; i < params.n; ++i) std::cout << "," << p[i];
        for (int i = 0; i < params.n; ++i) std::cout << "," << r[i];
        for (int i = 0; i < params.n; ++i) std::cout << "," << s[i];
        std::cout << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"p-persistent CSMA with RTS/CTS: analysis and simulation"};
    app.require_subcommand(1);

    Options opt;
    double beta_override = -1.0;
    int imin = 2, imax = 10;
    int l1_n = 2, l1_grid = 200;
    double l1_b = 3.0, l1_C = 1.0;
    double handshakes = 1e5;
    std::int64_t slots = 0;
    int replications = 20;
    std::string sweep_var = "beta";
    double sweep_from = 0.0, sweep_to = 1.0;
    int sweep_steps = 11;

    auto add_common = [&](CLI::App* sub, bool needs_scenario = true) {
        if (needs_scenario)
            sub->add_option("scenario", opt.scenario_path, "scenario JSON file")
                ->required();
        sub->add_option("--format", opt.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--tol", opt.tol, "numeric tolerance");
    };

    auto* grant = app.add_subcommand("grant", "grant probabilities for a given p");
    add_common(grant);
    grant->add_option("--p", opt.p_spec, "comma-separated request vector")
        ->required();

    auto* perf = app.add_subcommand("perf", "throughput and power for a given p");
    add_common(perf);
    perf->add_option("--p", opt.p_spec, "comma-separated request vector")
        ->required();

    auto* solve_cmd = app.add_subcommand("solve", "solve the equilibrium");
    add_common(solve_cmd);
    solve_cmd->add_flag("--worse", opt.want_worse, "also report the worse branch");

    auto* feas = app.add_subcommand("feasible", "feasibility verdict");
    add_common(feas);
    feas->add_flag("--worse", opt.want_worse, "also report the worse branch");

    auto* bound = app.add_subcommand("bound", "total-power upper bound");
    add_common(bound);
    bound->add_option("--beta", beta_override, "override the RTS fraction");

    auto* zeta = app.add_subcommand("zeta", "Psi crossing thresholds");
    add_common(zeta, false);
    zeta->add_option("--imin", imin);
    zeta->add_option("--imax", imax);

    auto* lemma1 = app.add_subcommand("lemma1", "grid extrema of sum G^");
    lemma1->add_option("--n", l1_n)->required();
    lemma1->add_option("--b", l1_b)->required();
    lemma1->add_option("--C", l1_C)->required();
    lemma1->add_option("--grid", l1_grid);

    auto* sim = app.add_subcommand("simulate", "slot-level Monte Carlo");
    add_common(sim);
    sim->add_option("--seed", opt.seed);
    sim->add_option("--handshakes", handshakes, "target handshake phases");
    sim->add_option("--slots", slots, "horizon per replication (overrides)");
    sim->add_option("--replications", replications);
    sim->add_flag("--compare", opt.compare, "include analytic values and z-scores");

    auto* sweep = app.add_subcommand("sweep", "CSV sweep over one scalar");
    add_common(sweep);
    sweep->add_option("--var", sweep_var, "beta | b | demand_scale | M");
    sweep->add_option("--from", sweep_from)->required();
    sweep->add_option("--to", sweep_to)->required();
    sweep->add_option("--steps", sweep_steps);

    CLI11_PARSE(app, argc, argv);

    try {
        if (grant->parsed()) return cmd_grant(opt);
        if (perf->parsed()) return cmd_perf(opt);
        if (solve_cmd->parsed()) return cmd_solve(opt);
        if (feas->parsed()) return cmd_feasible(opt);
        if (bound->parsed()) return cmd_bound(opt, beta_override);
        if (zeta->parsed()) return cmd_zeta(opt, imin, imax);
        if (lemma1->parsed()) return cmd_lemma1(l1_n, l1_b, l1_C, l1_grid);
        if (sim->parsed()) return cmd_simulate(opt, handshakes, slots, replications);
        if (sweep->parsed())
            return cmd_sweep(opt, sweep_var, sweep_from, sweep_to, sweep_steps);
    } catch (const InfeasibleLoad& e) {
        emit_error("InfeasibleLoad", e.what());
        return kExitInfeasible;
    } catch (const NoConvergence& e) {
        emit_error("NoConvergence", e.what());
        return kExitInternal;
    } catch (const MultipleWinners& e) {
        emit_error("MultipleWinners", e.what());
        return kExitInternal;
    } catch (const Error& e) {
        emit_error("InvalidInput", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        emit_error("InvalidInput", e.what());
        return kExitInvalid;
    }
    return 0;
}
