#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tzsim/backhaul.hpp"

namespace tzsim {

inline StateClass state_class_from_string(const std::string& s) {
    if (s == "Healthy") return StateClass::Healthy;
    if (s == "Unhealthy") return StateClass::Unhealthy;
    if (s == "Disconnected") return StateClass::Disconnected;
    if (s == "UnderRecovery") return StateClass::UnderRecovery;
    throw std::invalid_argument("unknown state class: " + s);
}

inline nlohmann::json chain_to_json(const BackhaulChain& chain) {
    nlohmann::json doc;
    doc["transition"] = chain.transition;
    doc["cssr"] = chain.cssr;
    nlohmann::json classes = nlohmann::json::array();
    for (StateClass c : chain.class_of) classes.push_back(std::string(to_string(c)));
    doc["class"] = classes;
    return doc;
}

inline BackhaulChain chain_from_json(const nlohmann::json& doc) {
    BackhaulChain chain;
    const auto& rows = doc.at("transition");
    if (rows.size() != kChainStates)
        throw std::invalid_argument("chain: transition must have 9 rows");
    for (std::size_t i = 0; i < kChainStates; ++i) {
        if (rows[i].size() != kChainStates)
            throw std::invalid_argument("chain: transition row must have 9 entries");
        for (std::size_t j = 0; j < kChainStates; ++j)
            chain.transition[i][j] = rows[i][j].get<double>();
    }
    const auto& cssr = doc.at("cssr");
    if (cssr.size() != kChainStates) throw std::invalid_argument("chain: cssr must have 9 values");
    for (std::size_t i = 0; i < kChainStates; ++i) chain.cssr[i] = cssr[i].get<double>();
    const auto& classes = doc.at("class");
    if (classes.size() != kChainStates)
        throw std::invalid_argument("chain: class must have 9 labels");
    for (std::size_t i = 0; i < kChainStates; ++i)
        chain.class_of[i] = state_class_from_string(classes[i].get<std::string>());
    return chain;
}

inline BackhaulChain load_chain(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open chain file: " + path);
    nlohmann::json doc;
    in >> doc;
    return chain_from_json(doc);
}

/// One state index per line; blank lines are ignored.
/// Throws with a 1-based line number on malformed input.
inline std::vector<int> parse_state_log(std::istream& in) {
    std::vector<int> states;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        std::string token = line.substr(begin, end - begin + 1);
        int value = 0;
        std::size_t consumed = 0;
        try {
            value = std::stoi(token, &consumed);
        } catch (const std::exception&) {
            consumed = std::string::npos;
        }
        if (consumed != token.size() || value < 1 || value > kChainStates)
            throw std::runtime_error("malformed state log at line " + std::to_string(line_no) +
                                     ": '" + token + "'");
        states.push_back(value);
    }
    return states;
}

inline std::vector<int> load_state_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open state log: " + path);
    return parse_state_log(in);
}

}  // namespace tzsim
