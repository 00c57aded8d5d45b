// Batch front end: simulate panels, run the estimators, replicate the
// synthetic experiment across seeds, and fit capacities from samples.
//
// Exit codes: 0 success, 1 input/validation error, 2 I/O error, 3 solver
// failure. Every run echoes its fully resolved configuration so results can
// be reproduced from the report alone.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nadid/did.hpp"
#include "nadid/error.hpp"
#include "nadid/fit.hpp"
#include "nadid/panel.hpp"
#include "nadid/replicate.hpp"
#include "nadid/serialize.hpp"
#include "nadid/simulate.hpp"

using nlohmann::json;

namespace {

// One spelling for every number in text output: the JSON one.
std::string num(double x) { return json(x).dump(); }

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw nadid::IoError("cannot open '" + path + "' for writing");
    }
    out << j.dump(2) << '\n';
    if (!out.good()) {
        throw nadid::IoError("write to '" + path + "' failed");
    }
}

// --config file.json holds flat {"long-flag-name": value} defaults; flags
// given on the command line win. Implemented by appending "--key=value" for
// every config key that does not already appear in the arguments.
std::vector<std::string> inject_config_args(const std::vector<std::string>& args) {
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (config_path.empty()) return args;

    std::ifstream in(config_path);
    if (!in) {
        throw nadid::IoError("cannot open config file '" + config_path + "'");
    }
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& err) {
        throw nadid::ValidationError("config file '" + config_path +
                                     "' is not valid JSON: " + std::string(err.what()));
    }
    if (!cfg.is_object()) {
        throw nadid::ValidationError("config file must hold a JSON object of flag values");
    }

    std::vector<std::string> out = args;
    for (const auto& [key, value] : cfg.items()) {
        const std::string flag = "--" + key;
        bool present = false;
        for (const auto& arg : args) {
            if (arg == flag || arg.rfind(flag + "=", 0) == 0) {
                present = true;
                break;
            }
        }
        if (present) continue;
        if (value.is_array()) {
            for (const auto& item : value) {
                out.push_back(flag + "=" +
                              (item.is_string() ? item.get<std::string>() : item.dump()));
            }
        } else {
            out.push_back(flag + "=" +
                          (value.is_string() ? value.get<std::string>() : value.dump()));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shared option blocks
// ---------------------------------------------------------------------------

struct DgpOptions {
    nadid::SimConfig config;

    void attach(CLI::App* cmd, bool require_core) {
        auto* units = cmd->add_option("--units", config.num_units, "Number of units");
        auto* periods = cmd->add_option("--periods", config.num_periods, "Number of periods");
        auto* start = cmd->add_option("--treat-start", config.treatment_start,
                                      "First treated period");
        if (require_core) {
            units->required();
            periods->required();
            start->required();
        }
        cmd->add_option("--treated-frac", config.treated_fraction,
                        "Probability a unit adopts the treatment");
        cmd->add_option("--seed", config.seed, "RNG seed");
        cmd->add_option("--noise-sd", config.noise_sd, "Noise standard deviation");
        cmd->add_option("--base-low", config.base_low, "Baseline lower bound");
        cmd->add_option("--base-high", config.base_high, "Baseline upper bound");
        cmd->add_option("--season-amp", config.season_amp, "Seasonal amplitude");
        cmd->add_option("--season-freq", config.season_freq, "Seasonal frequency");
        cmd->add_option("--peak-offset", config.effect_peak_offset,
                        "Periods from treatment start to peak effect");
        cmd->add_option("--effect-scale", config.effect_scale, "Peak effect size");
        cmd->add_option("--effect-decay", config.effect_decay, "Effect decay rate");
        cmd->add_option("--floor", config.floor, "Outcome floor");
    }

    json to_json() const {
        return json{{"units", config.num_units},
                    {"periods", config.num_periods},
                    {"treat-start", config.treatment_start},
                    {"treated-frac", config.treated_fraction},
                    {"seed", config.seed},
                    {"noise-sd", config.noise_sd},
                    {"base-low", config.base_low},
                    {"base-high", config.base_high},
                    {"season-amp", config.season_amp},
                    {"season-freq", config.season_freq},
                    {"peak-offset", config.effect_peak_offset},
                    {"effect-scale", config.effect_scale},
                    {"effect-decay", config.effect_decay},
                    {"floor", config.floor}};
    }
};

struct CapacityOptions {
    std::string kind = "sigmoid";  // sigmoid | uniform
    double lambda = 5.0;
    double theta = 0.5;
    std::string anchor = "raw";  // raw | anchored
    std::string file;            // explicit capacity JSON

    void attach(CLI::App* cmd) {
        cmd->add_option("--capacity", kind, "Capacity kind: sigmoid or uniform")
            ->check(CLI::IsMember({"sigmoid", "uniform"}));
        cmd->add_option("--lambda", lambda, "Sigmoid steepness");
        cmd->add_option("--theta", theta, "Sigmoid transition location");
        cmd->add_option("--anchor", anchor, "Sigmoid anchoring: raw or anchored")
            ->check(CLI::IsMember({"raw", "anchored"}));
        cmd->add_option("--capacity-file", file,
                        "Explicit capacity JSON (overrides --capacity)");
    }

    nadid::CapacitySpec spec() const {
        if (!file.empty()) {
            return nadid::CapacitySpec::make_explicit(nadid::read_capacity_file(file));
        }
        if (kind == "uniform") {
            return nadid::CapacitySpec::make_uniform();
        }
        return nadid::CapacitySpec::make_sigmoid(
            lambda, theta, anchor == "anchored" ? nadid::Anchor::anchored : nadid::Anchor::raw);
    }

    json to_json() const {
        if (!file.empty()) return json{{"capacity-file", file}};
        if (kind == "uniform") return json{{"capacity", "uniform"}};
        return json{{"capacity", "sigmoid"},
                    {"lambda", lambda},
                    {"theta", theta},
                    {"anchor", anchor}};
    }
};

struct ColumnOptions {
    nadid::ColumnMap map;

    void attach(CLI::App* cmd) {
        cmd->add_option("--col-unit", map.unit, "Unit id column name");
        cmd->add_option("--col-period", map.period, "Period column name");
        cmd->add_option("--col-treated", map.treated, "Treated indicator column name");
        cmd->add_option("--col-post", map.post, "Post indicator column name");
        cmd->add_option("--col-outcome", map.outcome, "Outcome column name");
    }

    json to_json() const {
        return json{{"col-unit", map.unit},
                    {"col-period", map.period},
                    {"col-treated", map.treated},
                    {"col-post", map.post},
                    {"col-outcome", map.outcome}};
    }
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateCmd {
    DgpOptions dgp;
    std::string out = "panel.csv";
    std::string trend_out;
    std::string config_file;

    int run() const {
        const nadid::PanelDataset panel = nadid::generate_panel(dgp.config);
        nadid::write_panel_csv_file(out, panel);
        json report;
        report["command"] = "simulate";
        report["config"] = dgp.to_json();
        report["config"]["out"] = out;
        report["outputs"] = json{{"panel", out}, {"rows", panel.rows().size()}};
        if (!trend_out.empty()) {
            nadid::write_trend_csv_file(trend_out, nadid::trend_table(panel));
            report["config"]["trend-out"] = trend_out;
            report["outputs"]["trend"] = trend_out;
        }
        std::cout << report.dump(2) << '\n';
        return 0;
    }
};

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateCmd {
    std::string panel_path;
    std::vector<std::string> methods{"all"};
    std::string mode = "time";  // nadid default outside the replication command
    std::string weights = "count";
    CapacityOptions capacity;
    ColumnOptions columns;
    std::string out;
    std::string config_file;

    int run() const {
        const nadid::PanelDataset panel = nadid::read_panel_csv_file(panel_path, columns.map);

        bool want_classical = false, want_ols = false, want_integral = false;
        bool want_time = false, want_listing = false;
        for (const auto& m : methods) {
            if (m == "all") {
                want_classical = want_ols = want_integral = true;
                want_time = want_listing = true;
            } else if (m == "classical" || m == "difference-table") {
                want_classical = true;
            } else if (m == "ols") {
                want_ols = true;
            } else if (m == "integral") {
                want_integral = true;
            } else if (m == "nadid") {
                if (mode == "listing") want_listing = true;
                else if (mode == "both") want_time = want_listing = true;
                else want_time = true;
            } else if (m == "nadid-time") {
                want_time = true;
            } else if (m == "nadid-listing") {
                want_listing = true;
            } else {
                throw nadid::ValidationError("unknown method '" + m + "'");
            }
        }

        json estimates = json::array();
        auto push_estimate = [&](const nadid::DidEstimate& est) {
            json e;
            e["method"] = nadid::method_name(est.method);
            e["value"] = est.value;
            if (est.cell_means) {
                e["cell_means"] = json{{"treated_post", est.cell_means->y1},
                                       {"control_post", est.cell_means->y2},
                                       {"treated_pre", est.cell_means->y3},
                                       {"control_pre", est.cell_means->y4}};
            }
            if (est.capacity_descriptor) e["capacity"] = *est.capacity_descriptor;
            if (!est.diagnostics.empty()) e["diagnostics"] = est.diagnostics;
            estimates.push_back(e);
        };

        if (want_classical) push_estimate(nadid::difference_table(panel));
        if (want_ols) {
            const nadid::OlsCoefficients coef = nadid::did_ols(panel);
            json e;
            e["method"] = "ols";
            e["value"] = coef.delta;
            e["coefficients"] = json{{"alpha", coef.alpha},
                                     {"beta", coef.beta},
                                     {"gamma", coef.gamma},
                                     {"delta", coef.delta}};
            estimates.push_back(e);
        }
        if (want_integral) {
            push_estimate(nadid::did_integral(
                panel, weights == "uniform" ? nadid::IntegralWeights::uniform
                                            : nadid::IntegralWeights::count_proportional));
        }
        const nadid::CapacitySpec spec =
            (want_time || want_listing) ? capacity.spec() : nadid::CapacitySpec::make_uniform();
        if (want_time) push_estimate(nadid::nadid_estimate(panel, spec, nadid::NadidMode::time_integral));
        if (want_listing) push_estimate(nadid::nadid_estimate(panel, spec, nadid::NadidMode::listing));

        json report;
        report["command"] = "estimate";
        report["config"] = json{{"panel", panel_path},
                                {"method", methods},
                                {"mode", mode},
                                {"weights", weights}};
        for (auto& [k, v] : capacity.to_json().items()) report["config"][k] = v;
        for (auto& [k, v] : columns.to_json().items()) report["config"][k] = v;
        report["estimates"] = estimates;

        std::cout << "resolved config: " << report["config"].dump() << '\n';
        for (const auto& e : estimates) {
            std::cout << e["method"].get<std::string>() << " = " << num(e["value"].get<double>());
            if (e.contains("capacity")) {
                std::cout << "  [" << e["capacity"].get<std::string>() << "]";
            }
            std::cout << '\n';
        }
        if (!out.empty()) write_json_file(out, report);
        return 0;
    }
};

// ---------------------------------------------------------------------------
// replicate
// ---------------------------------------------------------------------------

struct ReplicateCmd {
    DgpOptions dgp;
    CapacityOptions capacity;
    int seeds = 200;
    std::uint64_t base_seed = 1;
    std::string mode = "listing";  // the replication default
    std::string out;
    std::string per_seed_csv;
    std::string config_file;

    int run() const {
        if (seeds < 1) {
            throw nadid::ValidationError("--seeds must be >= 1");
        }
        const nadid::CapacitySpec spec = capacity.spec();
        const nadid::NadidMode nmode =
            mode == "time" ? nadid::NadidMode::time_integral : nadid::NadidMode::listing;
        const nadid::ReplicateSummary summary =
            nadid::replicate(dgp.config, seeds, base_seed, spec, nmode);

        json report;
        report["command"] = "replicate";
        report["config"] = dgp.to_json();
        report["config"]["seeds"] = seeds;
        report["config"]["base-seed"] = base_seed;
        report["config"]["mode"] = mode;
        for (auto& [k, v] : capacity.to_json().items()) report["config"][k] = v;
        json rows = json::array();
        for (const auto& row : summary.per_seed) {
            rows.push_back(
                json{{"seed", row.seed}, {"did", row.classical}, {"nadid", row.nadid}});
        }
        report["per_seed"] = rows;
        report["summary"] = json{{"mean_did", summary.mean_classical},
                                 {"mean_nadid", summary.mean_nadid},
                                 {"attenuation_fraction", summary.attenuation_fraction}};

        std::cout << "resolved config: " << report["config"].dump() << '\n';
        std::cout << "seed,did,nadid\n";
        for (const auto& row : summary.per_seed) {
            std::cout << row.seed << ',' << num(row.classical) << ',' << num(row.nadid) << '\n';
        }
        std::cout << "mean_did = " << num(summary.mean_classical) << '\n'
                  << "mean_nadid = " << num(summary.mean_nadid) << '\n'
                  << "attenuation_fraction = " << num(summary.attenuation_fraction) << '\n';

        if (!per_seed_csv.empty()) {
            std::ofstream csv(per_seed_csv);
            if (!csv) throw nadid::IoError("cannot open '" + per_seed_csv + "' for writing");
            csv << "seed,did,nadid\n";
            for (const auto& row : summary.per_seed) {
                csv << row.seed << ',' << num(row.classical) << ',' << num(row.nadid) << '\n';
            }
        }
        if (!out.empty()) write_json_file(out, report);
        return 0;
    }
};

// ---------------------------------------------------------------------------
// fit-capacity
// ---------------------------------------------------------------------------

struct FitCmd {
    std::string samples_path;
    std::string fit_mode = "full";  // full | symmetric | k-additive
    int k = 1;
    double tol = 1e-8;
    double epsilon = 1e-9;
    std::string out;
    std::string config_file;

    int run() const {
        const std::vector<nadid::Sample> samples = nadid::read_samples_csv_file(samples_path);
        nadid::FitResult result = [&] {
            if (fit_mode == "symmetric") return nadid::fit_symmetric(samples, tol, {}, epsilon);
            if (fit_mode == "k-additive") return nadid::fit_k_additive(samples, k, tol, epsilon);
            const nadid::QpProblem problem = nadid::build_qp(samples, epsilon);
            return nadid::solve_qp(problem, tol);
        }();

        const std::vector<double> predictions = nadid::predict(result.capacity, samples);
        double sq = 0.0;
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const double r = predictions[i] - samples[i].target;
            sq += r * r;
        }
        const double rms = std::sqrt(sq / static_cast<double>(samples.size()));

        json report = nadid::fit_result_to_json(result);
        report["command"] = "fit-capacity";
        report["config"] = json{{"samples", samples_path},
                                {"fit-mode", fit_mode},
                                {"k", k},
                                {"tol", tol},
                                {"epsilon", epsilon}};
        report["diagnostics"]["reprediction_rms"] = rms;

        std::cout << "resolved config: " << report["config"].dump() << '\n';
        std::cout << "objective = " << num(result.objective) << '\n'
                  << "kkt_residual = " << num(result.kkt_residual) << '\n'
                  << "iterations = " << result.iterations << '\n'
                  << "active_constraints = " << result.active_constraints << '\n'
                  << "reprediction_rms = " << num(rms) << '\n';
        if (!out.empty()) write_json_file(out, report);
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-additive difference-in-differences toolkit"};
    app.require_subcommand(1);

    SimulateCmd sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic hospital panel");
    sim.dgp.attach(sim_cmd, /*require_core=*/true);
    sim_cmd->add_option("--out", sim.out, "Panel CSV output path");
    sim_cmd->add_option("--trend-out", sim.trend_out, "Trend CSV output path");
    sim_cmd->add_option("--config", sim.config_file, "JSON config file with flag defaults");

    EstimateCmd est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate treatment effects from a panel CSV");
    est_cmd->add_option("--panel", est.panel_path, "Panel CSV path")->required();
    est_cmd->add_option("--method", est.methods,
                        "classical|ols|integral|nadid|nadid-time|nadid-listing|all (repeatable)");
    est_cmd->add_option("--mode", est.mode, "NA-DiD mode for --method nadid: time|listing|both")
        ->check(CLI::IsMember({"time", "listing", "both"}));
    est_cmd->add_option("--weights", est.weights, "Integral weights: count|uniform")
        ->check(CLI::IsMember({"count", "uniform"}));
    est.capacity.attach(est_cmd);
    est.columns.attach(est_cmd);
    est_cmd->add_option("--out", est.out, "JSON report output path");
    est_cmd->add_option("--config", est.config_file, "JSON config file with flag defaults");

    ReplicateCmd rep;
    auto* rep_cmd =
        app.add_subcommand("replicate", "Run the synthetic experiment across seeds");
    rep.dgp.attach(rep_cmd, /*require_core=*/false);
    rep_cmd->add_option("--seeds", rep.seeds, "Number of seeds");
    rep_cmd->add_option("--base-seed", rep.base_seed, "First seed");
    rep_cmd->add_option("--mode", rep.mode, "NA-DiD mode: time|listing")
        ->check(CLI::IsMember({"time", "listing"}));
    rep.capacity.attach(rep_cmd);
    rep_cmd->add_option("--out", rep.out, "JSON report output path");
    rep_cmd->add_option("--per-seed-csv", rep.per_seed_csv, "Per-seed CSV output path");
    rep_cmd->add_option("--config", rep.config_file, "JSON config file with flag defaults");

    FitCmd fit;
    auto* fit_cmd =
        app.add_subcommand("fit-capacity", "Fit a monotone capacity from samples CSV");
    fit_cmd->add_option("--samples", fit.samples_path, "Samples CSV (f_1..f_n,target)")
        ->required();
    fit_cmd->add_option("--fit-mode", fit.fit_mode, "full|symmetric|k-additive")
        ->check(CLI::IsMember({"full", "symmetric", "k-additive"}));
    fit_cmd->add_option("--k", fit.k, "Möbius order cap for k-additive fitting");
    fit_cmd->add_option("--tol", fit.tol, "KKT residual tolerance");
    fit_cmd->add_option("--epsilon", fit.epsilon, "Ridge regularization");
    fit_cmd->add_option("--out", fit.out, "Capacity JSON output path");
    fit_cmd->add_option("--config", fit.config_file, "JSON config file with flag defaults");

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = inject_config_args(args);
        // CLI11 consumes reversed argument vectors.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (sim_cmd->parsed()) return sim.run();
        if (est_cmd->parsed()) return est.run();
        if (rep_cmd->parsed()) return rep.run();
        if (fit_cmd->parsed()) return fit.run();
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const nadid::SolverError& err) {
        std::cerr << "solver failure: " << err.what() << '\n';
        return 3;
    } catch (const nadid::IoError& err) {
        std::cerr << "I/O error: " << err.what() << '\n';
        return 2;
    } catch (const nadid::Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return 1;
    }
}
