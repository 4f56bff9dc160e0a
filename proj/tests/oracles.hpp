#pragma once

// Independent test oracles. Everything here is deliberately brute force and
// stays independent of the implementation paths it checks.

#include <array>
#include <cmath>
#include <cstdint>

#include "tzsim/backhaul.hpp"

namespace tzsim::test {

/// P(at least one CSSO within k steps) by exhaustive enumeration of all 9^k
/// state paths. Usable for small k only.
inline double outage_probability_brute_force(const BackhaulChain& chain, int start, int k) {
    double total = 0.0;

    // Depth-first over paths; carries the path probability and the survival
    // product prod(cssr(state_t)).
    auto recurse = [&](auto&& self, int state, int depth, double prob, double survive) -> void {
        if (depth == k) {
            total += prob * (1.0 - survive);
            return;
        }
        for (int j = 1; j <= kChainStates; ++j) {
            double p = chain.prob(state, j);
            if (p == 0.0) continue;
            self(self, j, depth + 1, prob * p, survive * chain.cssr_of(j));
        }
    };
    recurse(recurse, start, 0, 1.0, 1.0);
    return total;
}

/// Half-width of a 3-sigma binomial confidence band around p over n trials.
inline double binomial_3sigma(double p, std::uint64_t n) {
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace tzsim::test
