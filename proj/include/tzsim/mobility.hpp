#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tzsim/rng.hpp"
#include "tzsim/types.hpp"

namespace tzsim {

/// Square region [-half_width, half_width]^2 with the edge-cloud disk at the
/// origin and four quadrant areas I..IV around it (counterclockwise from +x/+y).
struct RegionMap {
    double half_width_km = 4.0;
    double ec_radius_km = 2.0;

    bool inside_square(Vec2 p) const {
        return std::abs(p.x) <= half_width_km && std::abs(p.y) <= half_width_km;
    }
    double area_km2() const { return 4.0 * half_width_km * half_width_km; }
};

inline Area classify_area(const RegionMap& region, Vec2 p) {
    if (!region.inside_square(p))
        throw std::invalid_argument("classify_area: point outside the region square");
    if (p.x * p.x + p.y * p.y <= region.ec_radius_km * region.ec_radius_km) return Area::EC;
    if (p.x >= 0.0) return p.y >= 0.0 ? Area::I : Area::IV;
    return p.y >= 0.0 ? Area::II : Area::III;
}

struct SpeedDistribution {
    double mean_mps = 0.0;
    double stddev_mps = 0.0;
};

/// Per-class basic-speed distributions and per-(class, area) scaling factors.
struct MobilityTables {
    std::array<SpeedDistribution, kMobilityClassCount> basic_speed = {{
        {0.0, 0.0},   // STILL
        {1.5, 0.5},   // LOW
        {10.0, 2.0},  // MEDIUM
        {40.0, 5.0},  // HIGH
    }};
    // Rows: class; columns: EC, I, II, III, IV.
    std::array<std::array<double, kAreaCount>, kMobilityClassCount> factor = {{
        {0.0, 0.0, 0.0, 0.0, 0.0},
        {1.0, 1.0, 1.0, 1.0, 1.0},
        {0.7, 1.0, 0.9, 0.8, 0.9},
        {0.2, 1.0, 0.9, 0.85, 0.8},
    }};
};

inline double sample_basic_speed(const MobilityTables& tables, MobilityClass cls,
                                 rng::Stream& stream) {
    if (cls == MobilityClass::STILL) return 0.0;
    const SpeedDistribution& d = tables.basic_speed[static_cast<std::size_t>(cls)];
    return std::max(0.0, stream.normal(d.mean_mps, d.stddev_mps));
}

inline double effective_speed(const MobilityTables& tables, MobilityClass cls, Area area,
                              double basic_mps) {
    if (cls == MobilityClass::STILL) return 0.0;
    return basic_mps * tables.factor[static_cast<std::size_t>(cls)][static_cast<std::size_t>(area)];
}

struct UeRecord {
    std::uint64_t id = 0;
    Vec2 position{};
    MobilityClass mobility_class = MobilityClass::STILL;
    double basic_speed_mps = 0.0;
    bool profile_synced = false;
    TrustStatus trust = TrustStatus::Unauthenticated;
    // Replacements enter the region moving inward on their first step.
    bool has_forced_direction = false;
    double forced_direction_rad = 0.0;
};

struct WorldConfig {
    RegionMap region{};
    MobilityTables tables{};
    double density_per_km2 = 100.0;
    double step_seconds = 600.0;
    double substep_seconds = 10.0;
    bool spawn_uniform = false;  // spawn replacements uniformly instead of on the boundary
    std::uint64_t master_seed = 1;
};

struct World {
    WorldConfig cfg;
    std::vector<UeRecord> ues;
    std::uint64_t next_id = 0;
    std::uint64_t step_index = 0;

    std::size_t target_population() const {
        return static_cast<std::size_t>(std::llround(cfg.density_per_km2 * cfg.region.area_km2()));
    }
};

inline MobilityClass uniform_mobility_class(rng::Stream& stream) {
    return static_cast<MobilityClass>(stream.below(kMobilityClassCount));
}

inline World make_world(const WorldConfig& cfg) {
    World world{cfg, {}, 0, 0};
    std::size_t n = world.target_population();
    world.ues.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t id = world.next_id++;
        rng::Stream stream = rng::derive(cfg.master_seed, "ue-init", id);
        UeRecord ue;
        ue.id = id;
        ue.position.x = (stream.uniform() * 2.0 - 1.0) * cfg.region.half_width_km;
        ue.position.y = (stream.uniform() * 2.0 - 1.0) * cfg.region.half_width_km;
        ue.mobility_class = uniform_mobility_class(stream);
        ue.basic_speed_mps = sample_basic_speed(cfg.tables, ue.mobility_class, stream);
        world.ues.push_back(ue);
    }
    return world;
}

/// New UE entering the region after a departure: fresh id, boundary position,
/// uniform class, inward first direction.
inline UeRecord spawn_replacement(World& world, rng::Stream& stream) {
    const RegionMap& region = world.cfg.region;
    UeRecord ue;
    ue.id = world.next_id++;
    ue.mobility_class = uniform_mobility_class(stream);
    ue.basic_speed_mps = sample_basic_speed(world.cfg.tables, ue.mobility_class, stream);

    if (world.cfg.spawn_uniform) {
        ue.position.x = (stream.uniform() * 2.0 - 1.0) * region.half_width_km;
        ue.position.y = (stream.uniform() * 2.0 - 1.0) * region.half_width_km;
        return ue;
    }

    double hw = region.half_width_km;
    double u = stream.uniform() * 8.0 * hw;  // perimeter arc length
    Vec2 inward{};
    if (u < 2.0 * hw) {  // bottom edge, y = -hw
        ue.position = {u - hw, -hw};
        inward = {0.0, 1.0};
    } else if (u < 4.0 * hw) {  // right edge, x = +hw
        ue.position = {hw, (u - 2.0 * hw) - hw};
        inward = {-1.0, 0.0};
    } else if (u < 6.0 * hw) {  // top edge, y = +hw
        ue.position = {(u - 4.0 * hw) - hw, hw};
        inward = {0.0, -1.0};
    } else {  // left edge, x = -hw
        ue.position = {-hw, (u - 6.0 * hw) - hw};
        inward = {1.0, 0.0};
    }

    double theta = stream.uniform() * 2.0 * std::numbers::pi;
    Vec2 dir{std::cos(theta), std::sin(theta)};
    double dot = dir.x * inward.x + dir.y * inward.y;
    if (dot < 0.0) {  // reflect the outward component
        dir.x -= 2.0 * dot * inward.x;
        dir.y -= 2.0 * dot * inward.y;
    }
    ue.has_forced_direction = true;
    ue.forced_direction_rad = std::atan2(dir.y, dir.x);
    return ue;
}

/// Advances the world by one 600-s step: one direction draw per moving UE,
/// sub-stepped integration with area-dependent speed, boundary departures
/// replaced so the population stays constant. Returns the departed ids.
inline std::vector<std::uint64_t> advance_step(World& world) {
    const WorldConfig& cfg = world.cfg;
    const RegionMap& region = cfg.region;
    std::uint64_t step = world.step_index;
    int substeps = static_cast<int>(std::llround(cfg.step_seconds / cfg.substep_seconds));

    std::vector<std::uint64_t> departed;
    std::vector<std::size_t> departed_slots;

    for (std::size_t slot = 0; slot < world.ues.size(); ++slot) {
        UeRecord& ue = world.ues[slot];
        if (ue.mobility_class == MobilityClass::STILL) continue;

        double theta;
        if (ue.has_forced_direction) {
            theta = ue.forced_direction_rad;
            ue.has_forced_direction = false;
        } else {
            rng::Stream stream = rng::derive(cfg.master_seed, "ue-move", ue.id, step);
            theta = stream.uniform() * 2.0 * std::numbers::pi;
        }
        double dx = std::cos(theta);
        double dy = std::sin(theta);

        Vec2 p = ue.position;
        bool alive = true;
        for (int t = 0; t < substeps; ++t) {
            Area area = classify_area(region, p);
            double v = effective_speed(cfg.tables, ue.mobility_class, area, ue.basic_speed_mps);
            double km = v * cfg.substep_seconds / 1000.0;
            p.x += dx * km;
            p.y += dy * km;
            if (!region.inside_square(p)) {
                alive = false;
                break;
            }
        }
        if (alive) {
            ue.position = p;
        } else {
            departed.push_back(ue.id);
            departed_slots.push_back(slot);
        }
    }

    for (std::size_t slot : departed_slots) {
        std::uint64_t new_id = world.next_id;  // consumed inside spawn_replacement
        rng::Stream stream = rng::derive(cfg.master_seed, "ue-spawn", new_id, step);
        world.ues[slot] = spawn_replacement(world, stream);
    }
    world.step_index = step + 1;
    return departed;
}

/// Per-area population counts, indexed by Area.
inline std::array<std::size_t, kAreaCount> area_counts(const World& world) {
    std::array<std::size_t, kAreaCount> counts{};
    for (const UeRecord& ue : world.ues)
        ++counts[static_cast<std::size_t>(classify_area(world.cfg.region, ue.position))];
    return counts;
}

/// Runs the warm-up phase and records the per-area convergence diagnostic.
inline std::vector<std::array<std::size_t, kAreaCount>> run_warmup(World& world, int steps = 240) {
    std::vector<std::array<std::size_t, kAreaCount>> history;
    history.reserve(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) {
        advance_step(world);
        history.push_back(area_counts(world));
    }
    return history;
}

}  // namespace tzsim
