// tzsim: edge-cloud security reliability simulator.
//
// Subcommands: simulate, sweep, fit-chain, validate.
// Exit codes: 0 success, 2 configuration error, 3 runtime error,
// 4 sweep self-check violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tzsim/backhaul_io.hpp"
#include "tzsim/config.hpp"
#include "tzsim/experiment.hpp"
#include "tzsim/io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitSelfCheck = 4;

tzsim::ScenarioConfig load_config(const std::string& path) {
    nlohmann::json doc = nlohmann::json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw tzsim::ConfigError(path, "cannot open config file");
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw tzsim::ConfigError(path, std::string("invalid JSON: ") + e.what());
        }
    }
    return tzsim::parse_config(doc);
}

std::string render(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void emit_common(const tzsim::ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    tzsim::write_text_file((out_dir / "config_echo.json").string(),
                           render(tzsim::echo_config(cfg)));
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed_override,
                 const std::string& out_override) {
    tzsim::ScenarioConfig cfg = load_config(config_path);
    if (seed_override) cfg.seed = *seed_override;
    std::filesystem::path out_dir = out_override.empty() ? cfg.output_dir : out_override;
    emit_common(cfg, out_dir);

    tzsim::ExperimentResult result = tzsim::run_experiment(cfg.experiment());

    std::ostringstream rounds;
    tzsim::write_rounds_csv(rounds, result.metrics.series);
    tzsim::write_text_file((out_dir / "rounds.csv").string(), rounds.str());

    std::ostringstream world_csv;
    tzsim::write_world_csv(world_csv, result.world);
    tzsim::write_text_file((out_dir / "world.csv").string(), world_csv.str());

    std::ostringstream audit;
    tzsim::write_audit_jsonl(audit, result.audit);
    tzsim::write_text_file((out_dir / "audit.jsonl").string(), audit.str());

    nlohmann::json summary = tzsim::summary_json(result.metrics, result.world);
    summary["seed"] = cfg.seed;
    tzsim::write_text_file((out_dir / "summary.json").string(), render(summary));

    std::cout << "simulate: seed " << cfg.seed << ", reports "
              << result.metrics.csso_reports_total << ", sync traffic "
              << result.metrics.sync_traffic_total << ", outputs in " << out_dir << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& thresholds_arg,
              const std::string& seeds_arg, const std::string& out_override, bool self_check) {
    tzsim::ScenarioConfig cfg = load_config(config_path);
    std::filesystem::path out_dir = out_override.empty() ? cfg.output_dir : out_override;

    std::vector<std::optional<double>> thresholds;
    thresholds.push_back(std::nullopt);  // disabled baseline column
    if (thresholds_arg.empty()) {
        for (double t : cfg.thresholds) thresholds.emplace_back(t);
    } else {
        std::stringstream ss(thresholds_arg);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (token == "disabled" || token == "na" || token == "N/A") continue;
            double v = std::stod(token);
            if (v < 0.0 || v > 1.0)
                throw tzsim::ConfigError("--thresholds", "value out of [0,1]: " + token);
            thresholds.emplace_back(v);
        }
    }

    std::vector<std::uint64_t> seeds;
    if (seeds_arg.empty()) {
        seeds.push_back(cfg.seed);
    } else {
        std::stringstream ss(seeds_arg);
        std::string token;
        while (std::getline(ss, token, ','))
            seeds.push_back(static_cast<std::uint64_t>(std::stoull(token)));
    }

    emit_common(cfg, out_dir);
    std::vector<tzsim::SweepRow> rows =
        tzsim::threshold_sweep(cfg.experiment(), seeds, thresholds);

    std::ostringstream sweep_csv;
    tzsim::write_sweep_csv(sweep_csv, rows);
    tzsim::write_text_file((out_dir / "sweep.csv").string(), sweep_csv.str());

    std::ostringstream long_csv;
    tzsim::write_sweep_long_csv(long_csv, rows);
    tzsim::write_text_file((out_dir / "sweep_long.csv").string(), long_csv.str());

    std::cout << "sweep: " << rows.size() << " rows (" << seeds.size() << " seeds x "
              << thresholds.size() << " thresholds) in " << out_dir << "\n";

    if (self_check) {
        auto violation = tzsim::check_sweep_monotonicity(rows);
        if (violation) {
            std::cerr << "self-check: monotonicity violated between rows " << violation->first
                      << " and " << violation->second << "\n";
            return kExitSelfCheck;
        }
        std::cout << "self-check: monotonicity holds for all seeds\n";
    }
    return kExitOk;
}

int cmd_fit_chain(const std::string& log_path, double smoothing, const std::string& out_path) {
    std::vector<int> states;
    try {
        states = tzsim::load_state_log(log_path);
    } catch (const std::exception& e) {
        // Malformed input is a configuration problem, not a runtime failure.
        throw tzsim::ConfigError(log_path, e.what());
    }
    tzsim::BackhaulChain chain = tzsim::reference_chain();
    chain.transition = tzsim::fit_from_log(states, smoothing,
                                           tzsim::permitted_transitions(chain.class_of));
    nlohmann::json doc = tzsim::chain_to_json(chain);
    if (out_path.empty()) {
        std::cout << render(doc);
    } else {
        tzsim::write_text_file(out_path, render(doc));
        std::cout << "fit-chain: " << states.size() << " observations -> " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_validate(const std::string& config_path) {
    tzsim::ScenarioConfig cfg = load_config(config_path);
    std::cout << render(tzsim::echo_config(cfg));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-cloud security reliability simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed_override;
    std::string thresholds_arg;
    std::string seeds_arg;
    bool self_check = false;
    std::string log_path;
    double smoothing = 0.0;
    std::string chain_out;

    auto* simulate = app.add_subcommand("simulate", "Run one full experiment");
    simulate->add_option("--config", config_path, "Scenario config (JSON)");
    simulate->add_option("--seed", seed_override, "Master seed override");
    simulate->add_option("--out", out_dir, "Output directory");

    auto* sweep = app.add_subcommand("sweep", "Run a threshold sweep");
    sweep->add_option("--config", config_path, "Scenario config (JSON)");
    sweep->add_option("--thresholds", thresholds_arg, "Comma-separated risk thresholds");
    sweep->add_option("--seeds", seeds_arg, "Comma-separated seeds");
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_flag("--self-check", self_check, "Verify per-seed monotonicity, exit 4 on failure");

    auto* fit = app.add_subcommand("fit-chain", "Fit a transition matrix from a state log");
    fit->add_option("log", log_path, "State-per-line log file")->required();
    fit->add_option("--smoothing", smoothing, "Pseudo-count for permitted transitions");
    fit->add_option("--out", chain_out, "Output chain JSON path (default: stdout)");

    auto* validate = app.add_subcommand("validate", "Validate a config and echo it resolved");
    validate->add_option("--config", config_path, "Scenario config (JSON)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, seed_override, out_dir);
        if (sweep->parsed())
            return cmd_sweep(config_path, thresholds_arg, seeds_arg, out_dir, self_check);
        if (fit->parsed()) return cmd_fit_chain(log_path, smoothing, chain_out);
        if (validate->parsed()) return cmd_validate(config_path);
    } catch (const tzsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
