#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include "tzsim/config.hpp"

using namespace tzsim;

TEST_CASE("empty document yields the full default scenario") {
    ScenarioConfig cfg = parse_config(nlohmann::json::object());
    CHECK(cfg.seed == 1);
    CHECK(cfg.density_per_km2 == 100.0);
    CHECK(cfg.region.half_width_km == 4.0);
    CHECK(cfg.region.ec_radius_km == 2.0);
    CHECK(cfg.sync.interval_steps == 3);
    CHECK(cfg.warmup_steps() == 240);
    CHECK(cfg.training_steps() == 144);
    CHECK(cfg.testing_steps() == 4320);
    CHECK(cfg.chain.transition == reference_transition_matrix());
    World world = make_world(cfg.experiment().world);
    CHECK(world.ues.size() == 6400);
}

TEST_CASE("reference-scale density is honored") {
    ScenarioConfig cfg = parse_config({{"density_per_km2", 6250}});
    CHECK(make_world(cfg.experiment().world).target_population() == 400000);
}

TEST_CASE("out-of-range threshold names the offending path") {
    nlohmann::json doc = {{"sync", {{"thresholds", {1.5}}}}};
    try {
        parse_config(doc);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path() == "sync.thresholds[0]");
        CHECK(std::string(e.what()).find("[0,1]") != std::string::npos);
    }
}

TEST_CASE("unknown keys fail closed") {
    CHECK_THROWS_AS(parse_config({{"densty_per_km2", 100}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"sync", {{"treshold", 0.1}}}}), ConfigError);
    try {
        parse_config({{"region", {{"half_width", 4}}}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.path() == "region.half_width");
    }
}

TEST_CASE("invalid values are rejected with their paths") {
    CHECK_THROWS_AS(parse_config({{"density_per_km2", -5}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"sync", {{"interval_steps", 0}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"phases", {{"testing_days", 0}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"trust", {{"trigger_states", {11}}}}}), ConfigError);
    CHECK_THROWS_AS(parse_config({{"initial_backhaul_state", 0}}), ConfigError);

    // Broken chain: row 1 no longer sums to 1.
    nlohmann::json chain = chain_to_json(reference_chain());
    chain["transition"][0][0] = 0.9;
    CHECK_THROWS_AS(parse_config({{"chain", chain}}), ConfigError);
}

TEST_CASE("config echo round trip is idempotent") {
    nlohmann::json doc = {{"seed", 9},
                          {"density_per_km2", 25},
                          {"sync", {{"threshold", 0.2}, {"thresholds", {0.5, 0.2}}}},
                          {"trust", {{"trigger_states", {3, 4, 5, 9}}}},
                          {"phases", {{"testing_days", 2}}}};
    ScenarioConfig cfg = parse_config(doc);
    nlohmann::json echo = echo_config(cfg);
    ScenarioConfig reparsed = parse_config(echo);
    CHECK(echo_config(reparsed) == echo);
    CHECK(reparsed.seed == 9);
    CHECK(reparsed.thresholds == std::vector<double>{0.5, 0.2});
    CHECK(reparsed.trust.trigger_states == std::set<int>{3, 4, 5, 9});
}

TEST_CASE("mobility table overrides are applied") {
    nlohmann::json doc = {
        {"mobility",
         {{"speeds", {{"HIGH", {{"mean", 30.0}, {"std", 3.0}}}}},
          {"factors", {{"HIGH", {0.5, 1.0, 1.0, 1.0, 1.0}}}}}}};
    ScenarioConfig cfg = parse_config(doc);
    CHECK(cfg.tables.basic_speed[static_cast<std::size_t>(MobilityClass::HIGH)].mean_mps == 30.0);
    CHECK(cfg.tables.factor[static_cast<std::size_t>(MobilityClass::HIGH)][0] == 0.5);
    // Other classes keep their defaults.
    CHECK(cfg.tables.basic_speed[static_cast<std::size_t>(MobilityClass::LOW)].mean_mps == 1.5);
}
