#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tzsim {

/// Operating condition of the backhaul link, derived from the CSSR level.
enum class StateClass : std::uint8_t { Healthy, Unhealthy, Disconnected, UnderRecovery };

constexpr std::string_view to_string(StateClass c) noexcept {
    switch (c) {
        case StateClass::Healthy: return "Healthy";
        case StateClass::Unhealthy: return "Unhealthy";
        case StateClass::Disconnected: return "Disconnected";
        case StateClass::UnderRecovery: return "UnderRecovery";
    }
    return "?";
}

inline constexpr int kChainStates = 9;

using TransitionMatrix = std::array<std::array<double, kChainStates>, kChainStates>;
using CssrVector = std::array<double, kChainStates>;
using ClassVector = std::array<StateClass, kChainStates>;
using StructureMask = std::array<std::array<bool, kChainStates>, kChainStates>;

/// 9-state Markov model of the central security service reliability.
/// States are addressed 1..9 throughout the public API.
struct BackhaulChain {
    TransitionMatrix transition{};
    CssrVector cssr{};
    ClassVector class_of{};

    double cssr_of(int state) const { return cssr[static_cast<std::size_t>(state - 1)]; }
    StateClass state_class(int state) const {
        return class_of[static_cast<std::size_t>(state - 1)];
    }
    double prob(int from, int to) const {
        return transition[static_cast<std::size_t>(from - 1)][static_cast<std::size_t>(to - 1)];
    }
};

inline ClassVector default_state_classes() {
    return {StateClass::Healthy,       StateClass::Healthy,       StateClass::Unhealthy,
            StateClass::Unhealthy,     StateClass::Unhealthy,     StateClass::UnderRecovery,
            StateClass::UnderRecovery, StateClass::UnderRecovery, StateClass::Disconnected};
}

/// Decades-spaced reliability levels; recovery states mirror the unhealthy
/// levels they climb back through.
inline CssrVector default_cssr() {
    return {0.99999, 0.9999, 0.999, 0.99, 0.9, 0.999, 0.99, 0.9, 0.0};
}

inline TransitionMatrix reference_transition_matrix() {
    return {{{0.8, 0.1999, 0, 0, 0, 0, 0, 0, 0.0001},
             {0.5, 0.49, 0.0099, 0, 0, 0, 0, 0, 0.0001},
             {0, 0.25, 0.5, 0.15, 0, 0.0999, 0, 0, 0.0001},
             {0, 0, 0.25, 0.5, 0.15, 0, 0.0999, 0, 0.0001},
             {0, 0, 0, 0.2, 0.6, 0, 0, 0.1, 0.1},
             {0, 0.5, 0, 0, 0, 0.5, 0, 0, 0},
             {0, 0, 0, 0, 0, 0.5, 0.5, 0, 0},
             {0, 0, 0, 0, 0, 0, 0.5, 0.5, 0},
             {0, 0, 0, 0, 0, 0, 0, 0.3, 0.7}}};
}

inline BackhaulChain reference_chain() {
    return {reference_transition_matrix(), default_cssr(), default_state_classes()};
}

/// Transitions the chain structure admits: self-loops everywhere, neighbor
/// fluctuations inside the healthy/unhealthy band, disaster jumps to the
/// disconnected state, unhealthy -> paired recovery state, the recovery
/// ladder, top recovery state -> healthy band, and disconnected -> lowest
/// recovery state.
inline StructureMask permitted_transitions(const ClassVector& class_of) {
    std::vector<int> band;      // healthy + unhealthy, ascending index
    std::vector<int> recovery;  // under-recovery, ascending index
    std::vector<int> disc;
    for (int s = 1; s <= kChainStates; ++s) {
        switch (class_of[static_cast<std::size_t>(s - 1)]) {
            case StateClass::Healthy:
            case StateClass::Unhealthy: band.push_back(s); break;
            case StateClass::UnderRecovery: recovery.push_back(s); break;
            case StateClass::Disconnected: disc.push_back(s); break;
        }
    }

    StructureMask mask{};
    auto allow = [&mask](int from, int to) {
        mask[static_cast<std::size_t>(from - 1)][static_cast<std::size_t>(to - 1)] = true;
    };
    for (int s = 1; s <= kChainStates; ++s) allow(s, s);

    for (std::size_t i = 0; i + 1 < band.size(); ++i) {
        allow(band[i], band[i + 1]);
        allow(band[i + 1], band[i]);
    }
    for (int s : band)
        for (int d : disc) allow(s, d);

    if (!recovery.empty()) {
        // Recovery ladder climbs toward the lowest recovery index.
        for (std::size_t i = 0; i + 1 < recovery.size(); ++i)
            allow(recovery[i + 1], recovery[i]);
        // Pair the i-th unhealthy state with the i-th recovery state.
        std::vector<int> unhealthy;
        for (int s : band)
            if (class_of[static_cast<std::size_t>(s - 1)] == StateClass::Unhealthy)
                unhealthy.push_back(s);
        for (std::size_t i = 0; i < unhealthy.size(); ++i) {
            int r = recovery[std::min(i, recovery.size() - 1)];
            allow(unhealthy[i], r);
        }
        for (int d : disc) allow(d, recovery.back());
        // Top of the ladder rejoins the band.
        for (int s : band)
            if (class_of[static_cast<std::size_t>(s - 1)] == StateClass::Healthy)
                allow(recovery.front(), s);
    }
    return mask;
}

struct ChainValidation {
    bool ok = true;
    std::string message;
    int row = -1;
    int col = -1;

    explicit operator bool() const { return ok; }
};

inline ChainValidation chain_error(std::string msg, int row = -1, int col = -1) {
    return {false, std::move(msg), row, col};
}

/// Structural and stochastic validation. `strict_structure` additionally
/// enforces the permitted-transition mask; turn it off for chains fitted
/// from noisy logs.
inline ChainValidation validate_chain(const BackhaulChain& chain, bool strict_structure = true) {
    constexpr double kRowSumTol = 1e-9;
    for (int i = 1; i <= kChainStates; ++i) {
        double sum = 0.0;
        for (int j = 1; j <= kChainStates; ++j) {
            double p = chain.prob(i, j);
            if (p < 0.0)
                return chain_error("negative transition probability", i, j);
            sum += p;
        }
        if (std::abs(sum - 1.0) > kRowSumTol)
            return chain_error("row sum differs from 1 by more than 1e-9", i);
    }

    int disconnected = 0;
    for (int s = 1; s <= kChainStates; ++s) {
        double r = chain.cssr_of(s);
        if (r < 0.0 || r > 1.0) return chain_error("cssr outside [0,1]", s);
        if (chain.state_class(s) == StateClass::Disconnected) {
            disconnected = s;
            if (r != 0.0) return chain_error("disconnected state must have cssr 0", s);
        }
    }
    if (disconnected == 0) return chain_error("no disconnected state");

    std::vector<int> band, recovery;
    for (int s = 1; s <= kChainStates; ++s) {
        StateClass c = chain.state_class(s);
        if (c == StateClass::Healthy || c == StateClass::Unhealthy) band.push_back(s);
        if (c == StateClass::UnderRecovery) recovery.push_back(s);
    }
    for (std::size_t i = 0; i + 1 < band.size(); ++i)
        if (chain.cssr_of(band[i]) <= chain.cssr_of(band[i + 1]))
            return chain_error("cssr must strictly decrease along the healthy/unhealthy band",
                               band[i + 1]);
    for (std::size_t i = 0; i + 1 < recovery.size(); ++i)
        if (chain.cssr_of(recovery[i]) <= chain.cssr_of(recovery[i + 1]))
            return chain_error("cssr must strictly increase along the recovery climb",
                               recovery[i + 1]);

    if (strict_structure) {
        StructureMask mask = permitted_transitions(chain.class_of);
        for (int i = 1; i <= kChainStates; ++i)
            for (int j = 1; j <= kChainStates; ++j)
                if (chain.prob(i, j) > 0.0 &&
                    !mask[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)])
                    return chain_error("transition not permitted by chain structure", i, j);
    }
    return {};
}

/// One Markov step by cumulative-sum inversion over ascending state index.
inline int step_chain(const BackhaulChain& chain, int current, double draw) {
    double cum = 0.0;
    for (int j = 1; j <= kChainStates; ++j) {
        cum += chain.prob(current, j);
        if (draw < cum) return j;
    }
    // Row sums to 1 within tolerance; a draw past the last edge maps to the
    // last state with positive probability.
    for (int j = kChainStates; j >= 1; --j)
        if (chain.prob(current, j) > 0.0) return j;
    return current;
}

/// A CSSO occurs this step with probability 1 - cssr(state).
inline bool draw_csso(const BackhaulChain& chain, int state, double draw) {
    return draw < 1.0 - chain.cssr_of(state);
}

/// P(at least one CSSO in steps 1..k | state at step 0 = start), by forward
/// recursion over the no-outage-so-far state distribution.
inline double outage_probability_within(const BackhaulChain& chain, int start, int k) {
    if (k < 1) throw std::invalid_argument("outage_probability_within: k must be >= 1");
    std::array<double, kChainStates> surviving{};
    surviving[static_cast<std::size_t>(start - 1)] = 1.0;
    for (int step = 0; step < k; ++step) {
        std::array<double, kChainStates> next{};
        for (int i = 0; i < kChainStates; ++i) {
            if (surviving[static_cast<std::size_t>(i)] == 0.0) continue;
            for (int j = 0; j < kChainStates; ++j)
                next[static_cast<std::size_t>(j)] +=
                    surviving[static_cast<std::size_t>(i)] *
                    chain.transition[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        for (int j = 0; j < kChainStates; ++j)
            next[static_cast<std::size_t>(j)] *= chain.cssr[static_cast<std::size_t>(j)];
        surviving = next;
    }
    double alive = 0.0;
    for (double m : surviving) alive += m;
    return std::clamp(1.0 - alive, 0.0, 1.0);
}

/// Maximum-likelihood transition estimate from an observed state sequence,
/// with optional pseudo-counts restricted to structurally permitted cells.
/// Rows never observed (and given zero smoothing) default to self-loops.
inline TransitionMatrix fit_from_log(std::span<const int> observations, double smoothing,
                                     const StructureMask& mask) {
    if (observations.size() < 2)
        throw std::invalid_argument("fit_from_log: need at least 2 observations");
    if (smoothing < 0.0) throw std::invalid_argument("fit_from_log: smoothing must be >= 0");
    for (int s : observations)
        if (s < 1 || s > kChainStates)
            throw std::invalid_argument("fit_from_log: state index outside 1..9");

    std::array<std::array<double, kChainStates>, kChainStates> counts{};
    for (std::size_t t = 0; t + 1 < observations.size(); ++t)
        counts[static_cast<std::size_t>(observations[t] - 1)]
              [static_cast<std::size_t>(observations[t + 1] - 1)] += 1.0;

    TransitionMatrix fitted{};
    for (std::size_t i = 0; i < kChainStates; ++i) {
        double total = 0.0;
        for (std::size_t j = 0; j < kChainStates; ++j) {
            counts[i][j] += smoothing * (mask[i][j] ? 1.0 : 0.0);
            total += counts[i][j];
        }
        if (total == 0.0) {
            fitted[i][i] = 1.0;
            continue;
        }
        for (std::size_t j = 0; j < kChainStates; ++j) fitted[i][j] = counts[i][j] / total;
    }
    return fitted;
}

inline TransitionMatrix fit_from_log(std::span<const int> observations, double smoothing = 0.0) {
    return fit_from_log(observations, smoothing, permitted_transitions(default_state_classes()));
}

struct StationaryResult {
    std::array<double, kChainStates> pi{};
    bool converged = false;
    bool unique = true;
    int iterations = 0;
};

/// Power iteration to residual < 1e-12. Non-uniqueness (reducible chains) is
/// detected by iterating from two different starting points; in that case
/// the uniform vector is returned with unique = false.
inline StationaryResult stationary_distribution(const BackhaulChain& chain,
                                                int max_iterations = 1000000) {
    auto iterate = [&chain, max_iterations](std::array<double, kChainStates> pi, int& iters,
                                            bool& conv) {
        for (iters = 0; iters < max_iterations; ++iters) {
            std::array<double, kChainStates> next{};
            for (std::size_t i = 0; i < kChainStates; ++i)
                for (std::size_t j = 0; j < kChainStates; ++j)
                    next[j] += pi[i] * chain.transition[i][j];
            double residual = 0.0;
            for (std::size_t j = 0; j < kChainStates; ++j)
                residual += std::abs(next[j] - pi[j]);
            pi = next;
            if (residual < 1e-12) {
                conv = true;
                ++iters;
                break;
            }
        }
        return pi;
    };

    StationaryResult result;
    std::array<double, kChainStates> uniform{};
    uniform.fill(1.0 / kChainStates);
    std::array<double, kChainStates> delta{};
    delta[0] = 1.0;

    bool conv_a = false, conv_b = false;
    int iters_a = 0, iters_b = 0;
    auto pi_a = iterate(uniform, iters_a, conv_a);
    auto pi_b = iterate(delta, iters_b, conv_b);

    result.converged = conv_a && conv_b;
    result.iterations = std::max(iters_a, iters_b);
    double diff = 0.0;
    for (std::size_t j = 0; j < kChainStates; ++j) diff = std::max(diff, std::abs(pi_a[j] - pi_b[j]));
    if (diff > 1e-8) {
        result.unique = false;
        result.pi = uniform;
    } else {
        result.pi = pi_a;
    }
    return result;
}

}  // namespace tzsim
