#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "tzsim/backhaul.hpp"
#include "tzsim/mobility.hpp"
#include "tzsim/risk.hpp"
#include "tzsim/risk_io.hpp"
#include "tzsim/rng.hpp"

using namespace tzsim;

namespace {

// Trajectory of immobile UEs pinned at given positions.
std::vector<WorldSnapshot> still_trajectory(const std::vector<Vec2>& positions, int steps) {
    std::vector<WorldSnapshot> traj(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) {
        traj[static_cast<std::size_t>(t)].step = static_cast<std::uint64_t>(t);
        for (std::size_t i = 0; i < positions.size(); ++i)
            traj[static_cast<std::size_t>(t)].ues.push_back(
                {i, MobilityClass::STILL, positions[i]});
    }
    return traj;
}

std::vector<WorldSnapshot> capture(World& world, int steps) {
    std::vector<WorldSnapshot> traj;
    traj.push_back(snapshot(world));
    for (int t = 0; t < steps; ++t) {
        advance_step(world);
        traj.push_back(snapshot(world));
    }
    return traj;
}

}  // namespace

TEST_CASE("immobile UEs inside the EC train to certain arrival") {
    auto traj = still_trajectory({{0.0, 0.0}, {1.0, 1.0}}, 8);
    RegionMap region;
    MotionModel model = train_motion_model(traj, region);
    ArrivalStats center = arrival_stats(model, MobilityClass::STILL, 0.0);
    CHECK(center.p_arrival == 1.0);
    CHECK(center.expected_overlap == doctest::Approx(3.0));
}

TEST_CASE("immobile UEs outside the EC train to zero arrival") {
    auto traj = still_trajectory({{3.5, 3.5}}, 8);
    RegionMap region;
    MotionModel model = train_motion_model(traj, region);
    ArrivalStats far = arrival_stats(model, MobilityClass::STILL, std::hypot(3.5, 3.5));
    CHECK(far.p_arrival == 0.0);
    CHECK(far.expected_overlap == 0.0);
}

TEST_CASE("trajectories shorter than horizon + 1 are rejected") {
    auto traj = still_trajectory({{0.0, 0.0}}, 3);
    RegionMap region;
    CHECK_THROWS_AS(train_motion_model(traj, region), std::invalid_argument);
}

TEST_CASE("lookup equals the trained bin value; far distances clamp") {
    WorldConfig cfg;
    cfg.density_per_km2 = 50.0;
    cfg.master_seed = 21;
    World world = make_world(cfg);
    auto traj = capture(world, 40);
    MotionModel model = train_motion_model(traj, cfg.region);

    const auto& low_bins = model.bins[static_cast<std::size_t>(MobilityClass::LOW)];
    int bin = model.bin_of(2.05);
    ArrivalStats direct = low_bins[static_cast<std::size_t>(bin)];
    ArrivalStats looked = arrival_stats(model, MobilityClass::LOW, 2.05);
    CHECK(looked.p_arrival == direct.p_arrival);
    CHECK(looked.expected_overlap == direct.expected_overlap);
    CHECK(looked.p_arrival >= 0.0);
    CHECK(looked.p_arrival <= 1.0);

    // Corner distance ~5.66 km exceeds the last bin; clamps to it.
    ArrivalStats corner = arrival_stats(model, MobilityClass::LOW, 9.5);
    ArrivalStats last = low_bins.back();
    CHECK(corner.p_arrival == last.p_arrival);
}

TEST_CASE("trained LOW-class bin matches a direct recount on an independent world") {
    // The trained bin estimates P(EC arrival within 3 steps | LOW UE observed
    // in the 3.0-3.25 km annulus at a snapshot).  That population is NOT the
    // same as fresh UEs dropped into the annulus: survivors of the random
    // walk are biased toward low basic speeds (fast movers have already left
    // the region), so a cold-start Monte-Carlo simulation is the wrong
    // oracle.  Instead, recount the same conditional frequency by hand on an
    // independently seeded world, tracking raw ids and positions without any
    // of the training code.
    WorldConfig cfg;
    cfg.density_per_km2 = 150.0;
    cfg.master_seed = 31;
    RegionMap region = cfg.region;

    World world = make_world(cfg);
    run_warmup(world, 60);
    auto traj = capture(world, 144);
    MotionModel model = train_motion_model(traj, region);
    ArrivalStats trained =
        model.bins[static_cast<std::size_t>(MobilityClass::LOW)][static_cast<std::size_t>(
            model.bin_of(3.1))];
    REQUIRE(trained.sample_count > 1000);

    WorldConfig other = cfg;
    other.master_seed = 97;
    World oracle_world = make_world(other);
    run_warmup(oracle_world, 60);
    std::vector<std::map<std::uint64_t, Vec2>> frames;
    frames.push_back({});
    for (const UeRecord& ue : oracle_world.ues)
        if (ue.mobility_class == MobilityClass::LOW) frames.back()[ue.id] = ue.position;
    for (int t = 0; t < 144; ++t) {
        advance_step(oracle_world);
        frames.push_back({});
        for (const UeRecord& ue : oracle_world.ues)
            if (ue.mobility_class == MobilityClass::LOW) frames.back()[ue.id] = ue.position;
    }
    auto in_ec = [&](const Vec2& p) {
        return p.x * p.x + p.y * p.y <= region.ec_radius_km * region.ec_radius_km;
    };
    std::uint64_t samples = 0, arrivals = 0;
    for (std::size_t t = 0; t + 3 < frames.size(); ++t) {
        for (const auto& [id, pos] : frames[t]) {
            double d = std::hypot(pos.x, pos.y);
            if (d < 3.0 || d >= 3.25) continue;
            ++samples;
            for (std::size_t k = 1; k <= 3; ++k) {
                auto it = frames[t + k].find(id);
                // A missing id means the UE departed; it cannot arrive.
                if (it != frames[t + k].end() && in_ec(it->second)) {
                    ++arrivals;
                    break;
                }
            }
        }
    }
    REQUIRE(samples > 1000);
    double oracle = static_cast<double>(arrivals) / static_cast<double>(samples);
    CHECK(std::abs(trained.p_arrival - oracle) < 0.02);
}

TEST_CASE("risk degenerate cases and formula collapse") {
    auto traj = still_trajectory({{0.0, 0.0}, {3.9, 3.9}}, 8);
    RegionMap region;
    MotionModel model = train_motion_model(traj, region);
    BackhaulChain chain = reference_chain();

    // Immobile outside the EC: zero arrival, zero risk, any backhaul state.
    for (int state = 1; state <= kChainStates; ++state) {
        RiskEstimate far =
            estimate_csso_risk(model, MobilityClass::STILL, std::hypot(3.9, 3.9), 1, chain, state);
        CHECK(far.risk == 0.0);
    }

    // Immobile inside the EC: risk equals the horizon outage probability.
    for (int state = 1; state <= kChainStates; ++state) {
        RiskEstimate home = estimate_csso_risk(model, MobilityClass::STILL, 0.0, 0, chain, state);
        double p_h = outage_probability_within(chain, state, model.horizon_steps);
        CHECK(home.risk == doctest::Approx(p_h).epsilon(1e-12));
    }

    // A chain pinned in the disconnected state forces certain risk for a
    // resident UE; under the reference chain the disconnected state can
    // recover, so its risk stays strictly below 1.
    BackhaulChain pinned = chain;
    pinned.transition[8] = {};
    pinned.transition[8][8] = 1.0;
    RiskEstimate certain = estimate_csso_risk(model, MobilityClass::STILL, 0.0, 0, pinned, 9);
    CHECK(certain.risk == doctest::Approx(1.0).epsilon(1e-12));
    RiskEstimate recoverable = estimate_csso_risk(model, MobilityClass::STILL, 0.0, 0, chain, 9);
    CHECK(recoverable.risk < 1.0);
    CHECK(recoverable.risk > 0.5);
}

TEST_CASE("risk is bounded and monotone in its components") {
    BackhaulChain chain = reference_chain();
    rng::Stream stream = rng::derive(17, "risk-prop");
    MotionModel model;
    model.horizon_steps = 3;
    for (auto& row : model.bins) row.resize(static_cast<std::size_t>(model.bin_count()));

    auto risk_of = [&](double p_arrival, double overlap, int state) {
        model.bins[0][0] = {p_arrival, overlap, 1};
        return estimate_csso_risk(model, MobilityClass::STILL, 0.0, 0, chain, state).risk;
    };

    for (int i = 0; i < 5000; ++i) {
        double pa = stream.uniform();
        double ov = stream.uniform() * 3.0;
        int state = 1 + static_cast<int>(stream.below(9));
        double r = risk_of(pa, ov, state);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0);
        // Monotone in arrival probability and overlap.
        CHECK(risk_of(std::min(1.0, pa + 0.1), ov, state) >= r - 1e-15);
        CHECK(risk_of(pa, std::min(3.0, ov + 0.2), state) >= r - 1e-15);
    }

    // Monotone in the horizon outage probability: state 9 dominates state 1.
    double low = risk_of(0.7, 2.0, 1);
    double high = risk_of(0.7, 2.0, 9);
    CHECK(high >= low);
}

TEST_CASE("training is deterministic and the JSON round trip is exact") {
    WorldConfig cfg;
    cfg.density_per_km2 = 30.0;
    cfg.master_seed = 55;
    World w1 = make_world(cfg);
    World w2 = make_world(cfg);
    auto t1 = capture(w1, 20);
    auto t2 = capture(w2, 20);
    MotionModel a = train_motion_model(t1, cfg.region);
    MotionModel b = train_motion_model(t2, cfg.region);
    for (std::size_t c = 0; c < kMobilityClassCount; ++c)
        for (std::size_t i = 0; i < a.bins[c].size(); ++i) {
            CHECK(a.bins[c][i].p_arrival == b.bins[c][i].p_arrival);
            CHECK(a.bins[c][i].expected_overlap == b.bins[c][i].expected_overlap);
        }

    MotionModel back = motion_model_from_json(motion_model_to_json(a));
    CHECK(back.horizon_steps == a.horizon_steps);
    CHECK(back.bin_width_km == a.bin_width_km);
    for (std::size_t c = 0; c < kMobilityClassCount; ++c)
        for (std::size_t i = 0; i < a.bins[c].size(); ++i) {
            CHECK(back.bins[c][i].p_arrival == a.bins[c][i].p_arrival);
            CHECK(back.bins[c][i].expected_overlap == a.bins[c][i].expected_overlap);
        }
}
