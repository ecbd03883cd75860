// Core state types for undecided-state dynamics on the complete graph:
// opinions over the alphabet [k] u {undecided}, counts-level configurations,
// and the terminal-state classification shared by both communication models.
#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace usd {

enum class Model { Gossip, PP };

inline std::string model_name(Model m) { return m == Model::Gossip ? "gossip" : "pp"; }

// An opinion is either a decided index in [1..k] or the undecided symbol,
// encoded as 0. Decided indices are 1-based throughout the public API.
struct Opinion {
    static constexpr int kUndecided = 0;
    int value = kUndecided;

    constexpr Opinion() = default;
    constexpr explicit Opinion(int v) : value(v) {}
    static constexpr Opinion undecided() { return Opinion{}; }
    static constexpr Opinion decided(int index) { return Opinion{index}; }

    constexpr bool is_undecided() const { return value == kUndecided; }
    constexpr bool is_decided() const { return value != kUndecided; }
    friend constexpr bool operator==(Opinion a, Opinion b) { return a.value == b.value; }
    friend constexpr bool operator!=(Opinion a, Opinion b) { return a.value != b.value; }
};

// Pairwise update rule: two distinct decided opinions cancel to undecided,
// an undecided initiator adopts the sampled opinion, everything else keeps
// the initiator's opinion. Total on Opinion x Opinion.
constexpr Opinion usd_update(Opinion sigma1, Opinion sigma2) {
    if (sigma1.is_decided() && sigma2.is_decided() && sigma1 != sigma2) return Opinion::undecided();
    if (sigma1.is_undecided()) return sigma2;
    return sigma1;
}

// Counts-level configuration: counts[i-1] vertices hold decided opinion i,
// `undecided` hold the undecided symbol. Vertices within a class are
// exchangeable under both models, so this is the full Markov-chain state.
struct OpinionCounts {
    std::vector<std::uint64_t> counts;
    std::uint64_t undecided = 0;

    OpinionCounts() = default;
    OpinionCounts(std::vector<std::uint64_t> c, std::uint64_t u) : counts(std::move(c)), undecided(u) {
        if (counts.empty()) throw std::invalid_argument("OpinionCounts: k must be >= 1");
    }

    std::size_t k() const { return counts.size(); }
    std::uint64_t decided_total() const {
        return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
    }
    std::uint64_t n() const { return decided_total() + undecided; }

    // 1-based accessors matching opinion indices.
    std::uint64_t count_of(int opinion) const { return counts.at(static_cast<std::size_t>(opinion - 1)); }
    double alpha(int opinion) const { return static_cast<double>(count_of(opinion)) / static_cast<double>(n()); }
    double beta() const { return static_cast<double>(decided_total()) / static_cast<double>(n()); }

    friend bool operator==(const OpinionCounts& a, const OpinionCounts& b) {
        return a.undecided == b.undecided && a.counts == b.counts;
    }
};

inline void check_valid(const OpinionCounts& state) {
    if (state.counts.empty()) throw std::invalid_argument("state: k must be >= 1");
    if (state.n() == 0) throw std::invalid_argument("state: n must be positive");
}

// Terminal classification: consensus on one decided opinion, the absorbing
// all-undecided failure state, or an active (non-absorbed) configuration.
struct StateClass {
    enum class Kind { Consensus, AllUndecided, Active };
    Kind kind = Kind::Active;
    int winner = 0;  // decided opinion index when kind == Consensus

    bool is_active() const { return kind == Kind::Active; }
    friend bool operator==(const StateClass& a, const StateClass& b) {
        return a.kind == b.kind && a.winner == b.winner;
    }
};

inline StateClass classify_state(const OpinionCounts& state) {
    const std::uint64_t n = state.n();
    if (state.undecided == n) return {StateClass::Kind::AllUndecided, 0};
    for (std::size_t i = 0; i < state.k(); ++i) {
        if (state.counts[i] == n) return {StateClass::Kind::Consensus, static_cast<int>(i + 1)};
    }
    return {StateClass::Kind::Active, 0};
}

}  // namespace usd
