// Independent ground truth for the simulator and the closed-form moments:
// exhaustive one-step distributions, the exact class-pair transition of the
// pairwise-interaction model, moment extraction from a distribution, exact
// absorbing-chain solves on small instances, and Monte-Carlo one-step
// moment estimation.
#pragma once

#include <cstdint>
#include <vector>

#include "usd/analytic.hpp"
#include "usd/rng.hpp"
#include "usd/types.hpp"

namespace usd::oracle {

struct Outcome {
    std::vector<std::uint64_t> counts;
    std::uint64_t undecided = 0;
    double prob = 0.0;
};

struct OneStepDistribution {
    enum class Provenance { GossipExhaustive, GossipRows, PPExact };
    Provenance provenance = Provenance::GossipExhaustive;
    std::vector<Outcome> outcomes;  // sorted by counts vector, probabilities sum to 1
};

// Enumerates all n^n joint pull choices of one synchronous round and
// aggregates the resulting count vectors. Requires n <= 8.
OneStepDistribution gossip_onestep_exhaustive(const OpinionCounts& state);

// Same distribution built as a product of per-class binomials and the
// undecided multinomial (per-vertex independence makes this exact); far
// cheaper than enumeration and the row construction used by
// exact_absorption for the gossip model.
OneStepDistribution gossip_onestep_rows(const OpinionCounts& state);

// Exact one-interaction distribution of the pairwise model from ordered
// (initiator class, responder class) enumeration; any n.
OneStepDistribution pp_onestep_exact(const OpinionCounts& state);

// Exact moments of every tracked quantity under a one-step distribution;
// the left sides for all bound and equality checks.
struct OracleMoments {
    std::vector<double> mean_alpha, var_alpha, cov_alpha_beta;
    double mean_beta = 0.0, var_beta = 0.0;
    double mean_gamma = 0.0, var_gamma = 0.0;
    double mean_psi = 0.0;
    double mean_gamma_tilde = 0.0;       // E[gamma' / beta'^2]
    double mean_alpha_max = 0.0;
    double mean_alpha_max_tilde = 0.0;   // E[alpha_max' / beta']
    std::vector<double> mean_delta, cov_alpha_ij;  // per requested pair
    double mass_all_bot = 0.0;           // probability of the all-undecided outcome
};

OracleMoments moments_of(const OneStepDistribution& dist, const std::vector<PairSpec>& pairs = {});

// Total variation distance between two distributions over count states.
double total_variation(const OneStepDistribution& a, const OneStepDistribution& b);

enum class Precision { Double, Rational };

struct AbsorptionSolution {
    double failure_probability = 0.0;
    double success_probability = 0.0;
    std::vector<std::pair<int, double>> winner_probabilities;  // (opinion index, probability)
    double expected_steps = 0.0;
    std::uint64_t num_states = 0;  // size of the enumerated count-state space
};

// Solves the absorbing Markov chain on the count-state space reachable from
// `start` (compositions of n over the initially supported opinions plus the
// undecided class) by dense linear elimination. Throws if the state space
// exceeds `state_cap`. The rational path carries exact arithmetic end to end
// and is meant as a spot-check on tiny instances.
AbsorptionSolution exact_absorption(Model model, const OpinionCounts& start, std::uint64_t state_cap = 20000,
                                    Precision precision = Precision::Double);

// Empirical one-step moments of the dynamics-core samplers with CLT
// standard errors.
struct EmpiricalMoments {
    std::uint64_t samples = 0;
    std::vector<double> mean_alpha, stderr_alpha;
    double mean_beta = 0.0, var_beta = 0.0, stderr_beta = 0.0;
    double mean_gamma = 0.0, var_gamma = 0.0, stderr_gamma = 0.0;
    double mean_psi = 0.0, stderr_psi = 0.0;
    double mean_gamma_tilde = 0.0, stderr_gamma_tilde = 0.0;
    double mean_alpha_max_tilde = 0.0, stderr_alpha_max_tilde = 0.0;
};

EmpiricalMoments mc_onestep_moments(Model model, const OpinionCounts& state, std::uint64_t samples, Rng& rng);

}  // namespace usd::oracle
