#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "tzsim/backhaul.hpp"
#include "tzsim/mobility.hpp"
#include "tzsim/types.hpp"

namespace tzsim {

struct TrackedUe {
    std::uint64_t id = 0;
    MobilityClass mobility_class = MobilityClass::STILL;
    Vec2 position{};
};

struct WorldSnapshot {
    std::uint64_t step = 0;
    std::vector<TrackedUe> ues;
};

inline WorldSnapshot snapshot(const World& world) {
    WorldSnapshot snap;
    snap.step = world.step_index;
    snap.ues.reserve(world.ues.size());
    for (const UeRecord& ue : world.ues)
        snap.ues.push_back({ue.id, ue.mobility_class, ue.position});
    return snap;
}

/// Empirical arrival statistics for one (mobility class, distance bin) cell.
struct ArrivalStats {
    double p_arrival = 0.0;        // P(inside EC during >= 1 of the next horizon steps)
    double expected_overlap = 0.0; // expected number of in-EC steps within the horizon
    std::uint64_t sample_count = 0;
};

/// Motion statistics learned in the training phase, keyed by mobility class
/// and radial distance bin from the EC center. Unobserved bins fall back to
/// the nearest observed bin of the same class.
struct MotionModel {
    int horizon_steps = 3;
    double bin_width_km = 0.25;
    double max_distance_km = 6.0;
    std::array<std::vector<ArrivalStats>, kMobilityClassCount> bins{};

    int bin_count() const {
        return static_cast<int>(std::ceil(max_distance_km / bin_width_km));
    }
    int bin_of(double distance_km) const {
        int b = static_cast<int>(distance_km / bin_width_km);
        return std::clamp(b, 0, bin_count() - 1);
    }
};

struct MotionModelParams {
    int horizon_steps = 3;
    double bin_width_km = 0.25;
    double max_distance_km = 6.0;
};

inline MotionModel train_motion_model(std::span<const WorldSnapshot> trajectories,
                                      const RegionMap& region,
                                      const MotionModelParams& params = {}) {
    int h = params.horizon_steps;
    if (h < 1) throw std::invalid_argument("train_motion_model: horizon_steps must be >= 1");
    if (trajectories.size() < static_cast<std::size_t>(h) + 1)
        throw std::invalid_argument(
            "train_motion_model: trajectory must cover at least horizon_steps + 1 steps");

    MotionModel model;
    model.horizon_steps = h;
    model.bin_width_km = params.bin_width_km;
    model.max_distance_km = params.max_distance_km;
    int nbins = model.bin_count();

    struct Accumulator {
        std::uint64_t n = 0;
        std::uint64_t arrived = 0;
        std::uint64_t overlap = 0;
    };
    std::array<std::vector<Accumulator>, kMobilityClassCount> acc;
    for (auto& v : acc) v.resize(static_cast<std::size_t>(nbins));

    // Per-snapshot in-EC membership; absent ids (departed UEs) count as
    // outside the EC.
    double r2 = region.ec_radius_km * region.ec_radius_km;
    std::vector<std::unordered_map<std::uint64_t, bool>> in_ec(trajectories.size());
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        in_ec[t].reserve(trajectories[t].ues.size());
        for (const TrackedUe& ue : trajectories[t].ues)
            in_ec[t][ue.id] =
                ue.position.x * ue.position.x + ue.position.y * ue.position.y <= r2;
    }

    for (std::size_t t = 0; t + static_cast<std::size_t>(h) < trajectories.size(); ++t) {
        for (const TrackedUe& ue : trajectories[t].ues) {
            double d = std::sqrt(ue.position.x * ue.position.x + ue.position.y * ue.position.y);
            Accumulator& cell =
                acc[static_cast<std::size_t>(ue.mobility_class)]
                   [static_cast<std::size_t>(model.bin_of(d))];
            std::uint64_t overlap = 0;
            for (int f = 1; f <= h; ++f) {
                const auto& members = in_ec[t + static_cast<std::size_t>(f)];
                auto it = members.find(ue.id);
                if (it != members.end() && it->second) ++overlap;
            }
            ++cell.n;
            if (overlap > 0) ++cell.arrived;
            cell.overlap += overlap;
        }
    }

    for (std::size_t c = 0; c < kMobilityClassCount; ++c) {
        auto& out = model.bins[c];
        out.resize(static_cast<std::size_t>(nbins));
        // Observed cells first, then nearest-observed fallback.
        std::vector<int> observed;
        for (int b = 0; b < nbins; ++b) {
            const Accumulator& cell = acc[c][static_cast<std::size_t>(b)];
            if (cell.n == 0) continue;
            observed.push_back(b);
            out[static_cast<std::size_t>(b)] = {
                static_cast<double>(cell.arrived) / static_cast<double>(cell.n),
                static_cast<double>(cell.overlap) / static_cast<double>(cell.n), cell.n};
        }
        if (observed.empty()) continue;  // class never seen: p_arrival stays 0
        for (int b = 0; b < nbins; ++b) {
            const Accumulator& cell = acc[c][static_cast<std::size_t>(b)];
            if (cell.n > 0) continue;
            int nearest = observed.front();
            for (int o : observed)
                if (std::abs(o - b) < std::abs(nearest - b)) nearest = o;
            out[static_cast<std::size_t>(b)] = out[static_cast<std::size_t>(nearest)];
            out[static_cast<std::size_t>(b)].sample_count = 0;
        }
    }
    return model;
}

inline ArrivalStats arrival_stats(const MotionModel& model, MobilityClass cls,
                                  double distance_km) {
    const auto& row = model.bins[static_cast<std::size_t>(cls)];
    if (row.empty()) return {};
    return row[static_cast<std::size_t>(model.bin_of(distance_km))];
}

inline ArrivalStats arrival_stats(const MotionModel& model, const UeRecord& ue,
                                  const RegionMap&) {
    double d = std::sqrt(ue.position.x * ue.position.x + ue.position.y * ue.position.y);
    return arrival_stats(model, ue.mobility_class, d);
}

struct RiskEstimate {
    std::uint64_t ue_id = 0;
    double risk = 0.0;
    double p_arrival = 0.0;
    double expected_overlap = 0.0;
    double p_outage_horizon = 0.0;
};

/// Per-step outage probability backed out of the k-step forecast by
/// geometric averaging.
inline double per_step_outage(double horizon_probability, int horizon_steps) {
    return 1.0 - std::pow(1.0 - horizon_probability, 1.0 / horizon_steps);
}

/// CSSO risk for one UE over the model horizon: arrival probability times
/// the outage probability accumulated over the expected in-EC overlap.
inline RiskEstimate estimate_csso_risk(const MotionModel& model, MobilityClass cls,
                                       double distance_km, std::uint64_t ue_id,
                                       const BackhaulChain& chain, int backhaul_state) {
    ArrivalStats stats = arrival_stats(model, cls, distance_km);
    double p_horizon = outage_probability_within(chain, backhaul_state, model.horizon_steps);
    double p_step = per_step_outage(p_horizon, model.horizon_steps);
    double risk =
        stats.p_arrival * (1.0 - std::pow(1.0 - p_step, stats.expected_overlap));
    return {ue_id, std::clamp(risk, 0.0, 1.0), stats.p_arrival, stats.expected_overlap,
            p_horizon};
}

inline RiskEstimate estimate_csso_risk(const MotionModel& model, const UeRecord& ue,
                                       const BackhaulChain& chain, int backhaul_state) {
    double d = std::sqrt(ue.position.x * ue.position.x + ue.position.y * ue.position.y);
    return estimate_csso_risk(model, ue.mobility_class, d, ue.id, chain, backhaul_state);
}

}  // namespace tzsim
