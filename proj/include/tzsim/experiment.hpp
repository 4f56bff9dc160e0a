#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "tzsim/backhaul.hpp"
#include "tzsim/mobility.hpp"
#include "tzsim/risk.hpp"
#include "tzsim/rng.hpp"
#include "tzsim/trust_zone.hpp"

namespace tzsim {

struct SyncPolicy {
    int interval_steps = 3;  // 30 min at 600-s steps
    double threshold = 0.1;
    bool enabled = true;           // false models the no-TZ baseline
    bool scope_all_region = false; // count CSSO suffering outside the EC too
    bool persist_profiles = false; // keep profiles until departure instead of per-epoch
};

/// Local Subscriber Server: the synced-profile set for the current epoch.
struct LssState {
    std::unordered_set<std::uint64_t> synced;
    std::uint64_t epoch = 0;
};

struct RoundRecord {
    std::uint64_t step = 0;
    int backhaul_state = 1;
    bool csso = false;
    std::uint64_t reports = 0;
    std::uint64_t syncs = 0;
    TzMode mode = TzMode::CentralSecurity;
};

struct MetricsLedger {
    std::uint64_t csso_reports_total = 0;
    std::uint64_t sync_traffic_total = 0;
    std::uint64_t baseline_reports = 0;  // filled by sweeps (same seed, policy off)
    std::vector<RoundRecord> series;
};

/// One threshold-gated synchronization round. Skipped when the backhaul is
/// disconnected (no central connection to sync from); the previous epoch's
/// profiles then stay valid until the next successful round.
inline void sync_round(const SyncPolicy& policy, World& world, const MotionModel& model,
                       const BackhaulChain& chain, int backhaul_state, LssState& lss,
                       MetricsLedger& metrics, std::uint64_t& syncs_out) {
    syncs_out = 0;
    if (!policy.enabled) return;
    if (chain.state_class(backhaul_state) == StateClass::Disconnected) return;

    double p_horizon = outage_probability_within(chain, backhaul_state, model.horizon_steps);
    double p_step = per_step_outage(p_horizon, model.horizon_steps);

    std::unordered_set<std::uint64_t> next;
    next.reserve(lss.synced.size() + 16);
    for (UeRecord& ue : world.ues) {
        double d = std::sqrt(ue.position.x * ue.position.x + ue.position.y * ue.position.y);
        ArrivalStats stats = arrival_stats(model, ue.mobility_class, d);
        double risk = stats.p_arrival * (1.0 - std::pow(1.0 - p_step, stats.expected_overlap));
        bool synced = risk > policy.threshold;
        if (policy.persist_profiles) synced = synced || lss.synced.contains(ue.id);
        ue.profile_synced = synced;
        if (synced) next.insert(ue.id);
    }
    if (policy.persist_profiles) {
        // Only newly added profiles cost traffic in the persistent variant.
        for (std::uint64_t id : next)
            if (!lss.synced.contains(id)) ++syncs_out;
    } else {
        syncs_out = next.size();
    }
    metrics.sync_traffic_total += syncs_out;
    lss.synced = std::move(next);
    ++lss.epoch;
}

/// Applies one CSSO: every affected UE without a synced profile suffers once
/// and generates a report.
inline std::uint64_t apply_csso(const World& world, const LssState& lss, MetricsLedger& metrics,
                                bool scope_all_region = false) {
    std::uint64_t reports = 0;
    double r2 = world.cfg.region.ec_radius_km * world.cfg.region.ec_radius_km;
    for (const UeRecord& ue : world.ues) {
        if (!scope_all_region &&
            ue.position.x * ue.position.x + ue.position.y * ue.position.y > r2)
            continue;
        if (!lss.synced.contains(ue.id)) ++reports;
    }
    metrics.csso_reports_total += reports;
    return reports;
}

struct ExperimentConfig {
    WorldConfig world{};
    BackhaulChain chain = reference_chain();
    int initial_backhaul_state = 1;
    MotionModelParams risk{};
    SyncPolicy policy{};
    TrustZoneConfig trust{};
    std::size_t handback_batch = 100;
    int warmup_steps = 240;    // 40 h
    int training_steps = 144;  // 24 h
    int testing_steps = 4320;  // 30 days
};

struct ExperimentResult {
    MetricsLedger metrics;
    World world;  // final world
    MotionModel model;
    std::vector<AuditRecord> audit;  // all flushed + still-buffered audit records
    std::vector<std::array<std::size_t, kAreaCount>> warmup_history;
};

/// Full scenario: warm-up, training-phase trajectory capture and motion-model
/// fitting, then the month-long testing phase. All randomness derives from
/// the single master seed carried by the world config.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    ChainValidation valid = validate_chain(cfg.chain, false);
    if (!valid) throw std::invalid_argument("run_experiment: invalid chain: " + valid.message);

    std::uint64_t seed = cfg.world.master_seed;
    ExperimentResult result;
    result.world = make_world(cfg.world);
    World& world = result.world;

    result.warmup_history = run_warmup(world, cfg.warmup_steps);

    std::vector<WorldSnapshot> trajectory;
    trajectory.reserve(static_cast<std::size_t>(cfg.training_steps) + 1);
    trajectory.push_back(snapshot(world));
    for (int t = 0; t < cfg.training_steps; ++t) {
        advance_step(world);
        trajectory.push_back(snapshot(world));
    }
    result.model = train_motion_model(trajectory, cfg.world.region, cfg.risk);

    TrustZone tz(cfg.trust);
    LssState lss;
    MetricsLedger& metrics = result.metrics;
    metrics.series.reserve(static_cast<std::size_t>(cfg.testing_steps));
    int backhaul_state = cfg.initial_backhaul_state;
    double r2 = cfg.world.region.ec_radius_km * cfg.world.region.ec_radius_km;

    for (int t = 1; t <= cfg.testing_steps; ++t) {
        std::uint64_t gstep = world.step_index;  // global step index

        std::vector<std::uint64_t> departed = advance_step(world);
        for (std::uint64_t id : departed) {
            tz.forget(id);
            lss.synced.erase(id);
        }

        backhaul_state = step_chain(cfg.chain, backhaul_state,
                                    rng::derive(seed, "chain", 0, gstep).uniform());
        StateClass condition = cfg.chain.state_class(backhaul_state);
        tz.on_backhaul_report(backhaul_state, condition);

        // UEs inside the EC authenticate on first contact; under local
        // security this exercises the LAA/LSS path and fills the audit log.
        for (const UeRecord& ue : world.ues) {
            if (ue.position.x * ue.position.x + ue.position.y * ue.position.y > r2) continue;
            if (tz.status_of(ue.id) == TrustStatus::Unauthenticated ||
                (tz.laa_active() && tz.status_of(ue.id) == TrustStatus::EmergencyOnly))
                tz.authenticate(ue.id, lss.synced.contains(ue.id), gstep);
        }

        std::uint64_t syncs = 0;
        if (t % cfg.policy.interval_steps == 0)
            sync_round(cfg.policy, world, result.model, cfg.chain, backhaul_state, lss, metrics,
                       syncs);

        bool csso = draw_csso(cfg.chain, backhaul_state,
                              rng::derive(seed, "csso", 0, gstep).uniform());
        std::uint64_t reports = 0;
        if (csso) reports = apply_csso(world, lss, metrics, cfg.policy.scope_all_region);

        if (tz.mode() == TzMode::HandbackInProgress) {
            HandbackResult hb = tz.complete_handback(cfg.handback_batch, gstep);
            if (hb.completed)
                result.audit.insert(result.audit.end(), hb.flushed_audit.begin(),
                                    hb.flushed_audit.end());
        }

        metrics.series.push_back({gstep, backhaul_state, csso, reports, syncs, tz.mode()});
    }

    auto remaining = tz.audit_export();
    result.audit.insert(result.audit.end(), remaining.begin(), remaining.end());
    return result;
}

struct SweepRow {
    std::optional<double> threshold;  // nullopt = policy disabled (baseline)
    std::uint64_t seed = 0;
    std::uint64_t csso_reports = 0;
    std::uint64_t sync_traffic = 0;
    std::uint64_t baseline_reports = 0;
    double reliability_gain = 0.0;
};

/// Runs the experiment per (seed, threshold) with common random numbers:
/// the seed is shared across thresholds so rows of one seed are coupled.
inline std::vector<SweepRow> threshold_sweep(const ExperimentConfig& base,
                                             const std::vector<std::uint64_t>& seeds,
                                             const std::vector<std::optional<double>>& thresholds) {
    if (seeds.empty()) throw std::invalid_argument("threshold_sweep: need at least one seed");
    if (thresholds.size() < 2)
        throw std::invalid_argument("threshold_sweep: need at least two thresholds");

    std::vector<SweepRow> rows;
    for (std::uint64_t seed : seeds) {
        ExperimentConfig cfg = base;
        cfg.world.master_seed = seed;

        cfg.policy.enabled = false;
        std::uint64_t baseline = run_experiment(cfg).metrics.csso_reports_total;

        for (const std::optional<double>& threshold : thresholds) {
            SweepRow row;
            row.threshold = threshold;
            row.seed = seed;
            row.baseline_reports = baseline;
            if (!threshold) {
                row.csso_reports = baseline;
                row.sync_traffic = 0;
                row.reliability_gain = 0.0;
            } else {
                cfg.policy.enabled = true;
                cfg.policy.threshold = *threshold;
                ExperimentResult r = run_experiment(cfg);
                row.csso_reports = r.metrics.csso_reports_total;
                row.sync_traffic = r.metrics.sync_traffic_total;
                row.reliability_gain =
                    baseline == 0 ? 0.0
                                  : 1.0 - static_cast<double>(row.csso_reports) /
                                              static_cast<double>(baseline);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

/// Per-seed coupling check: as the threshold rises, reports must not fall
/// and traffic must not rise. Returns the first offending pair, if any.
inline std::optional<std::pair<std::size_t, std::size_t>> check_sweep_monotonicity(
    const std::vector<SweepRow>& rows) {
    auto level = [](const SweepRow& r) { return r.threshold ? *r.threshold : 2.0; };
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) {
            if (rows[i].seed != rows[j].seed) continue;
            if (level(rows[i]) < level(rows[j])) {
                if (rows[i].csso_reports > rows[j].csso_reports) return std::make_pair(i, j);
                if (rows[i].sync_traffic < rows[j].sync_traffic) return std::make_pair(i, j);
            }
        }
    return std::nullopt;
}

}  // namespace tzsim
