#include "usd/dynamics.hpp"

#include "usd/sampling.hpp"

namespace usd {

std::vector<std::size_t> alive_classes(const OpinionCounts& state) {
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < state.k(); ++i)
        if (state.counts[i] > 0) alive.push_back(i);
    return alive;
}

namespace {

// O(1) absorption test given the alive-class list.
bool absorbed(const OpinionCounts& state, const std::vector<std::size_t>& alive) {
    if (alive.empty()) return true;                              // all undecided
    return alive.size() == 1 && state.undecided == 0;            // consensus
}

void gossip_step_impl(OpinionCounts& state, std::vector<std::size_t>& alive,
                      std::vector<std::uint64_t>& scratch, std::uint64_t n, Rng& rng) {
    if (absorbed(state, alive)) return;
    const double nd = static_cast<double>(n);
    const std::uint64_t undecided0 = state.undecided;

    // Decided classes: survivors of class i keep opinion i.
    for (std::size_t idx : alive) {
        const std::uint64_t c = state.counts[idx];
        const double p_keep = static_cast<double>(c + undecided0) / nd;  // alpha_i + 1 - beta
        scratch[idx] = binomial(rng, c, p_keep);
    }
    // Undecided class: multinomial over (counts..., undecided0)/n via
    // sequential conditional binomials; the leftover stays undecided.
    std::uint64_t remaining = undecided0;
    std::uint64_t weight_left = n;
    for (std::size_t idx : alive) {
        const std::uint64_t c = state.counts[idx];
        if (remaining == 0) break;
        const std::uint64_t adopt = binomial(rng, remaining, static_cast<double>(c) / static_cast<double>(weight_left));
        scratch[idx] += adopt;
        remaining -= adopt;
        weight_left -= c;
    }

    std::uint64_t decided = 0;
    std::size_t out = 0;
    for (std::size_t pos = 0; pos < alive.size(); ++pos) {
        const std::size_t idx = alive[pos];
        state.counts[idx] = scratch[idx];
        decided += scratch[idx];
        if (scratch[idx] > 0) alive[out++] = idx;
    }
    alive.resize(out);
    state.undecided = n - decided;
}

void pp_step_impl(OpinionCounts& state, std::vector<std::size_t>& alive, std::uint64_t n, Rng& rng) {
    if (absorbed(state, alive)) return;

    // Map a uniform vertex to its class: positive decided classes in
    // ascending index order, then the undecided block.
    const std::size_t undecided_class = state.k();
    auto pick_class = [&](std::uint64_t r) -> std::size_t {
        for (std::size_t idx : alive) {
            if (r < state.counts[idx]) return idx;
            r -= state.counts[idx];
        }
        return undecided_class;
    };
    const std::size_t initiator = pick_class(rng.below(n));
    const std::size_t responder = pick_class(rng.below(n));

    if (initiator == responder) return;
    if (initiator == undecided_class) {
        // Undecided initiator adopts the responder's decided opinion.
        --state.undecided;
        ++state.counts[responder];
    } else if (responder != undecided_class) {
        // Two distinct decided opinions cancel the initiator to undecided.
        if (--state.counts[initiator] == 0) {
            for (std::size_t pos = 0; pos < alive.size(); ++pos) {
                if (alive[pos] == initiator) {
                    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pos));
                    break;
                }
            }
        }
        ++state.undecided;
    }
    // Decided initiator with undecided responder keeps its opinion.
}

}  // namespace

void gossip_step_inplace(OpinionCounts& state, std::vector<std::size_t>& alive,
                         std::vector<std::uint64_t>& scratch, Rng& rng) {
    gossip_step_impl(state, alive, scratch, state.n(), rng);
}

void pp_step_inplace(OpinionCounts& state, std::vector<std::size_t>& alive, Rng& rng) {
    pp_step_impl(state, alive, state.n(), rng);
}

OpinionCounts gossip_step(const OpinionCounts& state, Rng& rng) {
    check_valid(state);
    OpinionCounts next = state;
    auto alive = alive_classes(next);
    std::vector<std::uint64_t> scratch(next.k(), 0);
    gossip_step_inplace(next, alive, scratch, rng);
    return next;
}

OpinionCounts pp_step(const OpinionCounts& state, Rng& rng) {
    check_valid(state);
    OpinionCounts next = state;
    auto alive = alive_classes(next);
    pp_step_inplace(next, alive, rng);
    return next;
}

std::string trial_outcome_name(TrialOutcome o) {
    switch (o) {
        case TrialOutcome::Consensus: return "consensus";
        case TrialOutcome::Failure: return "failure";
        case TrialOutcome::Timeout: return "timeout";
    }
    return "?";
}

TrialResult run_trial(Model model, const OpinionCounts& init, Rng& rng, std::uint64_t max_steps,
                      const StepObserver& observer) {
    check_valid(init);
    OpinionCounts state = init;
    auto alive = alive_classes(state);
    std::vector<std::uint64_t> scratch(state.k(), 0);
    const std::uint64_t n = state.n();

    std::uint64_t t = 0;
    while (!absorbed(state, alive) && t < max_steps) {
        if (model == Model::Gossip) {
            gossip_step_impl(state, alive, scratch, n, rng);
        } else {
            pp_step_impl(state, alive, n, rng);
        }
        ++t;
        if (observer) observer(t, state);
    }

    TrialResult result;
    result.steps = t;
    const StateClass cls = classify_state(state);
    if (cls.kind == StateClass::Kind::Consensus) {
        result.outcome = TrialOutcome::Consensus;
        result.winner = cls.winner;
    } else if (cls.kind == StateClass::Kind::AllUndecided) {
        result.outcome = TrialOutcome::Failure;
    } else {
        result.outcome = TrialOutcome::Timeout;
    }
    return result;
}

std::uint64_t default_max_steps(Model model) {
    return model == Model::Gossip ? 1'000'000ull : 1'000'000'000ull;
}

}  // namespace usd
