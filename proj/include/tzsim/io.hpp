#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "tzsim/experiment.hpp"
#include "tzsim/mobility.hpp"
#include "tzsim/trust_zone.hpp"

namespace tzsim {

/// Shortest round-trippable decimal form, locale independent.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = std::strtod(buf, nullptr);
    if (parsed == v) {
        for (int precision = 1; precision < 17; ++precision) {
            char shorter[64];
            std::snprintf(shorter, sizeof(shorter), "%.*g", precision, v);
            if (std::strtod(shorter, nullptr) == v) return shorter;
        }
    }
    return buf;
}

inline void write_rounds_csv(std::ostream& out, std::span<const RoundRecord> series) {
    out << "step,backhaul_state,csso,reports_this_step,syncs_this_round,mode\n";
    for (const RoundRecord& r : series)
        out << r.step << ',' << r.backhaul_state << ',' << (r.csso ? 1 : 0) << ',' << r.reports
            << ',' << r.syncs << ',' << to_string(r.mode) << '\n';
}

inline void write_world_csv(std::ostream& out, const World& world) {
    out << "step,ue_id,x_km,y_km,class,area,synced,trust\n";
    for (const UeRecord& ue : world.ues)
        out << world.step_index << ',' << ue.id << ',' << format_double(ue.position.x) << ','
            << format_double(ue.position.y) << ',' << to_string(ue.mobility_class) << ','
            << to_string(classify_area(world.cfg.region, ue.position)) << ','
            << (ue.profile_synced ? 1 : 0) << ',' << to_string(ue.trust) << '\n';
}

inline void write_sweep_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "threshold,seed,csso_reports,sync_traffic,baseline_reports,reliability_gain\n";
    for (const SweepRow& r : rows)
        out << (r.threshold ? format_double(*r.threshold) : std::string("disabled")) << ','
            << r.seed << ',' << r.csso_reports << ',' << r.sync_traffic << ','
            << r.baseline_reports << ',' << format_double(r.reliability_gain) << '\n';
}

/// Plot-ready long format: one (threshold, seed, metric, value) row per cell.
inline void write_sweep_long_csv(std::ostream& out, std::span<const SweepRow> rows) {
    out << "threshold,seed,metric,value\n";
    for (const SweepRow& r : rows) {
        std::string t = r.threshold ? format_double(*r.threshold) : std::string("disabled");
        out << t << ',' << r.seed << ",csso_reports," << r.csso_reports << '\n';
        out << t << ',' << r.seed << ",sync_traffic," << r.sync_traffic << '\n';
        out << t << ',' << r.seed << ",reliability_gain," << format_double(r.reliability_gain)
            << '\n';
    }
}

inline void write_audit_jsonl(std::ostream& out, std::span<const AuditRecord> records) {
    for (const AuditRecord& r : records) {
        nlohmann::json line = {{"step", r.step},
                               {"ue", r.ue},
                               {"op", std::string(to_string(r.op))},
                               {"detail", r.detail}};
        out << line.dump() << '\n';
    }
}

inline nlohmann::json summary_json(const MetricsLedger& metrics, const World& world) {
    std::uint64_t csso_steps = 0;
    for (const RoundRecord& r : metrics.series)
        if (r.csso) ++csso_steps;
    return {{"csso_reports_total", metrics.csso_reports_total},
            {"sync_traffic_total", metrics.sync_traffic_total},
            {"testing_steps", metrics.series.size()},
            {"csso_steps", csso_steps},
            {"ue_population", world.ues.size()}};
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write: " + path);
    out << contents;
}

}  // namespace tzsim
