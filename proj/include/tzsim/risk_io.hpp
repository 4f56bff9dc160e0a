#pragma once

#include <string>

#include <json.hpp>

#include "tzsim/risk.hpp"

namespace tzsim {

inline MobilityClass mobility_class_from_string(const std::string& s) {
    if (s == "STILL") return MobilityClass::STILL;
    if (s == "LOW") return MobilityClass::LOW;
    if (s == "MEDIUM") return MobilityClass::MEDIUM;
    if (s == "HIGH") return MobilityClass::HIGH;
    throw std::invalid_argument("unknown mobility class: " + s);
}

inline nlohmann::json motion_model_to_json(const MotionModel& model) {
    nlohmann::json doc;
    doc["horizon_steps"] = model.horizon_steps;
    doc["bin_width_km"] = model.bin_width_km;
    doc["max_distance_km"] = model.max_distance_km;
    nlohmann::json bins = nlohmann::json::object();
    for (std::size_t c = 0; c < kMobilityClassCount; ++c) {
        const auto& row = model.bins[c];
        for (std::size_t b = 0; b < row.size(); ++b) {
            const ArrivalStats& s = row[b];
            if (s.sample_count == 0 && s.p_arrival == 0.0 && s.expected_overlap == 0.0) continue;
            std::string key = std::string(to_string(static_cast<MobilityClass>(c))) + ":" +
                              std::to_string(b);
            bins[key] = {{"p_arrival", s.p_arrival},
                         {"expected_overlap", s.expected_overlap},
                         {"n", s.sample_count}};
        }
    }
    doc["bins"] = bins;
    return doc;
}

inline MotionModel motion_model_from_json(const nlohmann::json& doc) {
    MotionModel model;
    model.horizon_steps = doc.at("horizon_steps").get<int>();
    model.bin_width_km = doc.at("bin_width_km").get<double>();
    model.max_distance_km = doc.value("max_distance_km", 6.0);
    int nbins = model.bin_count();
    for (auto& row : model.bins) row.resize(static_cast<std::size_t>(nbins));
    for (const auto& [key, value] : doc.at("bins").items()) {
        std::size_t colon = key.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("motion model: bad bin key: " + key);
        MobilityClass cls = mobility_class_from_string(key.substr(0, colon));
        int b = std::stoi(key.substr(colon + 1));
        if (b < 0 || b >= nbins)
            throw std::invalid_argument("motion model: bin index out of range: " + key);
        ArrivalStats& s =
            model.bins[static_cast<std::size_t>(cls)][static_cast<std::size_t>(b)];
        s.p_arrival = value.at("p_arrival").get<double>();
        s.expected_overlap = value.at("expected_overlap").get<double>();
        s.sample_count = value.at("n").get<std::uint64_t>();
    }
    return model;
}

}  // namespace tzsim
