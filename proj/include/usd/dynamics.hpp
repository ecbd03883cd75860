// Counts-level Markov-chain steps for both communication models, plus the
// trial driver with absorption detection.
//
// Gossip round (one synchronous update of every vertex): conditioned on the
// current configuration, a vertex of decided class i keeps opinion i with
// probability alpha_i + 1 - beta and becomes undecided otherwise; an
// undecided vertex adopts opinion i with probability alpha_i and stays
// undecided with probability 1 - beta, all vertices independently. The
// counts-level sampler draws one binomial per decided class and one
// (k+1)-category multinomial for the undecided class, which is exact in
// distribution because per-vertex next opinions are independent and depend
// only on the vertex's own class.
//
// Population-protocol step (one asynchronous interaction): an ordered pair
// of vertices is drawn uniformly with replacement and the initiator applies
// the pairwise update rule, so at most one vertex moves between classes.
//
// Randomness consumption order (fixed for reproducibility): gossip draws one
// binomial per decided class with positive count in ascending index order,
// then the undecided multinomial as sequential conditional binomials over
// positive-count classes in ascending index order; pp draws the initiator
// class, then the responder class. Absorbing states consume no draws.
#pragma once

#include <cstdint>
#include <functional>

#include "usd/rng.hpp"
#include "usd/types.hpp"

namespace usd {

OpinionCounts gossip_step(const OpinionCounts& state, Rng& rng);
OpinionCounts pp_step(const OpinionCounts& state, Rng& rng);

// In-place variants used by the trial loop (no per-step allocation).
// `alive` must list the positive-count class indices (0-based) in ascending
// order and is pruned as classes die; dead classes never revive in either
// model. `scratch` must have size k.
void gossip_step_inplace(OpinionCounts& state, std::vector<std::size_t>& alive,
                         std::vector<std::uint64_t>& scratch, Rng& rng);
void pp_step_inplace(OpinionCounts& state, std::vector<std::size_t>& alive, Rng& rng);

std::vector<std::size_t> alive_classes(const OpinionCounts& state);

enum class TrialOutcome { Consensus, Failure, Timeout };

std::string trial_outcome_name(TrialOutcome o);

struct TrialResult {
    TrialOutcome outcome = TrialOutcome::Timeout;
    int winner = 0;           // decided opinion index when outcome == Consensus
    std::uint64_t steps = 0;  // gossip: rounds; pp: interactions
};

// Observer receives (step index, state) after each step, before the
// termination check. Pass nullptr to skip.
using StepObserver = std::function<void(std::uint64_t, const OpinionCounts&)>;

// Iterates the chosen step operation until the state leaves the Active class
// or max_steps is reached. The initial configuration is step 0.
TrialResult run_trial(Model model, const OpinionCounts& init, Rng& rng, std::uint64_t max_steps,
                      const StepObserver& observer = nullptr);

inline TrialResult run_trial(Model model, const OpinionCounts& init, StepRandomness sr, std::uint64_t max_steps,
                             const StepObserver& observer = nullptr) {
    Rng rng(sr);
    return run_trial(model, init, rng, max_steps, observer);
}

// Default trial caps: 1e6 gossip rounds, 1e9 pp interactions.
std::uint64_t default_max_steps(Model model);

}  // namespace usd
