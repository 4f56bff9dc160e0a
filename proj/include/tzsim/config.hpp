#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tzsim/backhaul.hpp"
#include "tzsim/backhaul_io.hpp"
#include "tzsim/experiment.hpp"
#include "tzsim/mobility.hpp"
#include "tzsim/risk_io.hpp"

namespace tzsim {

class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::string path, const std::string& message)
        : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    double density_per_km2 = 100.0;  // desk scale; the reference scenario uses 6250
    RegionMap region{};
    double step_seconds = 600.0;
    double substep_seconds = 10.0;
    bool spawn_uniform = false;
    MobilityTables tables{};
    BackhaulChain chain = reference_chain();
    int initial_backhaul_state = 1;
    MotionModelParams risk{};
    SyncPolicy sync{};
    std::vector<double> thresholds = {0.5, 0.2, 0.1, 0.05, 0.02};
    TrustZoneConfig trust{};
    std::size_t handback_batch = 100;
    double warmup_hours = 40.0;
    double training_hours = 24.0;
    double testing_days = 30.0;
    std::string output_dir = "out";

    int steps_per_hour() const { return static_cast<int>(std::llround(3600.0 / step_seconds)); }
    int warmup_steps() const { return static_cast<int>(std::llround(warmup_hours * steps_per_hour())); }
    int training_steps() const {
        return static_cast<int>(std::llround(training_hours * steps_per_hour()));
    }
    int testing_steps() const {
        return static_cast<int>(std::llround(testing_days * 24.0 * steps_per_hour()));
    }

    ExperimentConfig experiment() const {
        ExperimentConfig cfg;
        cfg.world.region = region;
        cfg.world.tables = tables;
        cfg.world.density_per_km2 = density_per_km2;
        cfg.world.step_seconds = step_seconds;
        cfg.world.substep_seconds = substep_seconds;
        cfg.world.spawn_uniform = spawn_uniform;
        cfg.world.master_seed = seed;
        cfg.chain = chain;
        cfg.initial_backhaul_state = initial_backhaul_state;
        cfg.risk = risk;
        cfg.policy = sync;
        cfg.trust = trust;
        cfg.handback_batch = handback_batch;
        cfg.warmup_steps = warmup_steps();
        cfg.training_steps = training_steps();
        cfg.testing_steps = testing_steps();
        return cfg;
    }
};

namespace detail {

inline void require_keys(const nlohmann::json& obj, const std::string& path,
                         std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        bool found = false;
        for (const char* k : known)
            if (key == k) {
                found = true;
                break;
            }
        if (!found)
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown key");
    }
}

template <typename T>
T get_or(const nlohmann::json& obj, const char* key, const std::string& path, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(path.empty() ? key : path + "." + key, "wrong type");
    }
}

inline void check_probability(double v, const std::string& path) {
    if (v < 0.0 || v > 1.0) throw ConfigError(path, "out of [0,1]");
}

inline void check_positive(double v, const std::string& path) {
    if (!(v > 0.0)) throw ConfigError(path, "must be > 0");
}

}  // namespace detail

/// Parses and fully validates a scenario document. Omitted fields fall back
/// to the reference scenario at desk-scale density; unknown keys are errors.
inline ScenarioConfig parse_config(const nlohmann::json& doc) {
    using detail::check_positive;
    using detail::check_probability;
    using detail::get_or;
    using detail::require_keys;

    if (!doc.is_object()) throw ConfigError("", "config document must be a JSON object");
    require_keys(doc, "",
                 {"seed", "density_per_km2", "region", "mobility", "chain", "chain_file", "cssr",
                  "initial_backhaul_state", "sync", "trust", "risk", "phases", "output_dir"});

    ScenarioConfig cfg;
    cfg.seed = get_or<std::uint64_t>(doc, "seed", "", cfg.seed);
    cfg.density_per_km2 = get_or<double>(doc, "density_per_km2", "", cfg.density_per_km2);
    check_positive(cfg.density_per_km2, "density_per_km2");

    if (doc.contains("region")) {
        const auto& r = doc.at("region");
        require_keys(r, "region",
                     {"half_width_km", "ec_radius_km", "step_seconds", "substep_seconds",
                      "spawn_uniform"});
        cfg.region.half_width_km = get_or<double>(r, "half_width_km", "region", 4.0);
        cfg.region.ec_radius_km = get_or<double>(r, "ec_radius_km", "region", 2.0);
        cfg.step_seconds = get_or<double>(r, "step_seconds", "region", 600.0);
        cfg.substep_seconds = get_or<double>(r, "substep_seconds", "region", 10.0);
        cfg.spawn_uniform = get_or<bool>(r, "spawn_uniform", "region", false);
        check_positive(cfg.region.half_width_km, "region.half_width_km");
        check_positive(cfg.region.ec_radius_km, "region.ec_radius_km");
        check_positive(cfg.step_seconds, "region.step_seconds");
        check_positive(cfg.substep_seconds, "region.substep_seconds");
        if (cfg.region.ec_radius_km > cfg.region.half_width_km)
            throw ConfigError("region.ec_radius_km", "EC disk must fit inside the square");
    }

    if (doc.contains("mobility")) {
        const auto& m = doc.at("mobility");
        require_keys(m, "mobility", {"speeds", "factors"});
        if (m.contains("speeds")) {
            for (const auto& [key, value] : m.at("speeds").items()) {
                MobilityClass cls = mobility_class_from_string(key);
                require_keys(value, "mobility.speeds." + key, {"mean", "std"});
                SpeedDistribution& d = cfg.tables.basic_speed[static_cast<std::size_t>(cls)];
                d.mean_mps = get_or<double>(value, "mean", "mobility.speeds." + key, d.mean_mps);
                d.stddev_mps = get_or<double>(value, "std", "mobility.speeds." + key, d.stddev_mps);
                if (d.stddev_mps < 0.0)
                    throw ConfigError("mobility.speeds." + key + ".std", "must be >= 0");
            }
        }
        if (m.contains("factors")) {
            for (const auto& [key, value] : m.at("factors").items()) {
                MobilityClass cls = mobility_class_from_string(key);
                if (!value.is_array() || value.size() != kAreaCount)
                    throw ConfigError("mobility.factors." + key,
                                      "must be an array of 5 factors (EC, I, II, III, IV)");
                for (std::size_t a = 0; a < kAreaCount; ++a)
                    cfg.tables.factor[static_cast<std::size_t>(cls)][a] = value[a].get<double>();
            }
        }
    }

    if (doc.contains("chain") && doc.contains("chain_file"))
        throw ConfigError("chain", "give either an inline chain or chain_file, not both");
    if (doc.contains("chain")) cfg.chain = chain_from_json(doc.at("chain"));
    if (doc.contains("chain_file")) cfg.chain = load_chain(doc.at("chain_file").get<std::string>());
    if (doc.contains("cssr")) {
        const auto& cssr = doc.at("cssr");
        if (cssr.size() != kChainStates) throw ConfigError("cssr", "must have 9 values");
        for (std::size_t i = 0; i < kChainStates; ++i) {
            cfg.chain.cssr[i] = cssr[i].get<double>();
            check_probability(cfg.chain.cssr[i], "cssr[" + std::to_string(i) + "]");
        }
    }
    cfg.initial_backhaul_state = get_or<int>(doc, "initial_backhaul_state", "", 1);
    if (cfg.initial_backhaul_state < 1 || cfg.initial_backhaul_state > kChainStates)
        throw ConfigError("initial_backhaul_state", "must be in 1..9");

    if (doc.contains("sync")) {
        const auto& s = doc.at("sync");
        require_keys(s, "sync",
                     {"interval_steps", "threshold", "thresholds", "enabled", "scope_all_region",
                      "persist_profiles"});
        cfg.sync.interval_steps = get_or<int>(s, "interval_steps", "sync", 3);
        if (cfg.sync.interval_steps < 1)
            throw ConfigError("sync.interval_steps", "must be >= 1");
        cfg.sync.threshold = get_or<double>(s, "threshold", "sync", 0.1);
        check_probability(cfg.sync.threshold, "sync.threshold");
        cfg.sync.enabled = get_or<bool>(s, "enabled", "sync", true);
        cfg.sync.scope_all_region = get_or<bool>(s, "scope_all_region", "sync", false);
        cfg.sync.persist_profiles = get_or<bool>(s, "persist_profiles", "sync", false);
        if (s.contains("thresholds")) {
            cfg.thresholds.clear();
            const auto& list = s.at("thresholds");
            for (std::size_t i = 0; i < list.size(); ++i) {
                double v = list[i].get<double>();
                check_probability(v, "sync.thresholds[" + std::to_string(i) + "]");
                cfg.thresholds.push_back(v);
            }
        }
    }

    if (doc.contains("trust")) {
        const auto& t = doc.at("trust");
        require_keys(t, "trust", {"trigger_states", "handback_batch"});
        if (t.contains("trigger_states")) {
            cfg.trust.trigger_states.clear();
            for (const auto& v : t.at("trigger_states")) {
                int s = v.get<int>();
                if (s < 1 || s > kChainStates)
                    throw ConfigError("trust.trigger_states", "state index outside 1..9");
                cfg.trust.trigger_states.insert(s);
            }
        }
        cfg.handback_batch =
            get_or<std::size_t>(t, "handback_batch", "trust", cfg.handback_batch);
        if (cfg.handback_batch < 1) throw ConfigError("trust.handback_batch", "must be >= 1");
    }

    if (doc.contains("risk")) {
        const auto& r = doc.at("risk");
        require_keys(r, "risk", {"horizon_steps", "bin_width_km", "max_distance_km"});
        cfg.risk.horizon_steps = get_or<int>(r, "horizon_steps", "risk", 3);
        if (cfg.risk.horizon_steps < 1) throw ConfigError("risk.horizon_steps", "must be >= 1");
        cfg.risk.bin_width_km = get_or<double>(r, "bin_width_km", "risk", 0.25);
        check_positive(cfg.risk.bin_width_km, "risk.bin_width_km");
        cfg.risk.max_distance_km = get_or<double>(r, "max_distance_km", "risk", 6.0);
        check_positive(cfg.risk.max_distance_km, "risk.max_distance_km");
    }

    if (doc.contains("phases")) {
        const auto& p = doc.at("phases");
        require_keys(p, "phases", {"warmup_hours", "training_hours", "testing_days"});
        cfg.warmup_hours = get_or<double>(p, "warmup_hours", "phases", 40.0);
        cfg.training_hours = get_or<double>(p, "training_hours", "phases", 24.0);
        cfg.testing_days = get_or<double>(p, "testing_days", "phases", 30.0);
        check_positive(cfg.warmup_hours, "phases.warmup_hours");
        check_positive(cfg.training_hours, "phases.training_hours");
        check_positive(cfg.testing_days, "phases.testing_days");
    }

    cfg.output_dir = get_or<std::string>(doc, "output_dir", "", cfg.output_dir);

    if (cfg.training_steps() < cfg.risk.horizon_steps + 1)
        throw ConfigError("phases.training_hours",
                          "training phase shorter than the risk horizon + 1 steps");
    ChainValidation valid = validate_chain(cfg.chain, !doc.contains("chain_file"));
    if (!valid)
        throw ConfigError("chain", valid.message +
                                       (valid.row > 0 ? " (row " + std::to_string(valid.row) +
                                                            (valid.col > 0
                                                                 ? ", col " + std::to_string(valid.col)
                                                                 : "") +
                                                            ")"
                                                      : ""));
    return cfg;
}

/// Fully resolved config, suitable for reproducing the run byte-for-byte.
/// parse_config(echo_config(c)) == c.
inline nlohmann::json echo_config(const ScenarioConfig& cfg) {
    nlohmann::json doc;
    doc["seed"] = cfg.seed;
    doc["density_per_km2"] = cfg.density_per_km2;
    doc["region"] = {{"half_width_km", cfg.region.half_width_km},
                     {"ec_radius_km", cfg.region.ec_radius_km},
                     {"step_seconds", cfg.step_seconds},
                     {"substep_seconds", cfg.substep_seconds},
                     {"spawn_uniform", cfg.spawn_uniform}};
    nlohmann::json speeds = nlohmann::json::object();
    nlohmann::json factors = nlohmann::json::object();
    for (int c = 0; c < kMobilityClassCount; ++c) {
        std::string name(to_string(static_cast<MobilityClass>(c)));
        const SpeedDistribution& d = cfg.tables.basic_speed[static_cast<std::size_t>(c)];
        speeds[name] = {{"mean", d.mean_mps}, {"std", d.stddev_mps}};
        factors[name] = cfg.tables.factor[static_cast<std::size_t>(c)];
    }
    doc["mobility"] = {{"speeds", speeds}, {"factors", factors}};
    doc["chain"] = chain_to_json(cfg.chain);
    doc["initial_backhaul_state"] = cfg.initial_backhaul_state;
    doc["sync"] = {{"interval_steps", cfg.sync.interval_steps},
                   {"threshold", cfg.sync.threshold},
                   {"thresholds", cfg.thresholds},
                   {"enabled", cfg.sync.enabled},
                   {"scope_all_region", cfg.sync.scope_all_region},
                   {"persist_profiles", cfg.sync.persist_profiles}};
    doc["trust"] = {{"trigger_states", cfg.trust.trigger_states},
                    {"handback_batch", cfg.handback_batch}};
    doc["risk"] = {{"horizon_steps", cfg.risk.horizon_steps},
                   {"bin_width_km", cfg.risk.bin_width_km},
                   {"max_distance_km", cfg.risk.max_distance_km}};
    doc["phases"] = {{"warmup_hours", cfg.warmup_hours},
                     {"training_hours", cfg.training_hours},
                     {"testing_days", cfg.testing_days}};
    doc["output_dir"] = cfg.output_dir;
    return doc;
}

}  // namespace tzsim
