// Closed-form one-step conditional moments (equalities) and one-step
// inequality bounds for both models, plus the exact probability that a
// single gossip round annihilates every decided opinion.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "usd/quantities.hpp"
#include "usd/types.hpp"

namespace usd {

struct PairSpec {
    int i = 1;
    int j = 2;
    double eps = 0.0;
};

// Conditional moments of the next configuration given the current one.
// Every field except the flagged beta-variance is an exact equality; the
// pp beta variance is reported as an upper bound.
struct MomentReport {
    Model model = Model::Gossip;
    std::vector<double> mean_alpha;      // E[alpha'_i] per opinion
    std::vector<double> var_alpha;       // Var[alpha'_i]
    std::vector<double> cov_alpha_beta;  // Cov[alpha'_i, beta']
    double mean_beta = 0.0;
    double var_beta = 0.0;
    bool var_beta_is_bound = false;  // true for pp (value is an upper bound)
    double mean_gamma = 0.0;
    bool has_mean_gamma = false;  // exact for pp only
    std::vector<double> mean_delta;    // E[delta'^(eps)(i,j)] per requested pair
    std::vector<double> cov_alpha_ij;  // Cov[alpha'_i, alpha'_j] per requested pair
};

MomentReport exact_moments_gossip(const OpinionCounts& state, const std::vector<PairSpec>& pairs = {});
MomentReport exact_moments_pp(const OpinionCounts& state, const std::vector<PairSpec>& pairs = {});

// Finite-n reading of the asymptotic drift hypotheses (beta bounded below,
// psi and gamma small, n large). Configurable; the defaults are the gates
// the verification suites assert under.
struct HypothesisParams {
    double beta_min = 0.49;
    double psi_max = 0.01;
    double gamma_max = 0.01;
    std::uint64_t n_min = 10000;
};

// What the exact left side of a bound is, so a verifier can evaluate it
// from an independent one-step distribution.
enum class BoundLhs {
    MeanGamma,            // E[gamma']
    MeanGammaTimesBeta2,  // beta^2 * E[gamma']
    MeanPsi,              // E[psi']
    MeanTnpm,             // E[alpha_max' / beta']
    MeanTnpt,             // E[gamma' / beta'^2]
    VarBeta,              // Var[beta']
    VarGamma,             // Var[gamma']
};

enum class Relation { LE, GE };

struct BoundEntry {
    std::string name;
    BoundLhs lhs = BoundLhs::MeanGamma;
    Relation relation = Relation::LE;
    double rhs = 0.0;
    bool hypothesis_ok = true;
};

struct BoundReport {
    Model model = Model::Gossip;
    std::vector<BoundEntry> entries;
};

// Evaluates the right side of every one-step inequality for the model and
// whether its drift hypotheses hold at the supplied gates. Left sides are
// the verifier's job (exact enumeration or Monte Carlo).
BoundReport bound_report(Model model, const OpinionCounts& state, const HypothesisParams& params = {});

// Exact probability that one gossip round from `state` yields the
// all-undecided configuration:
//   (1 - beta)^{(1-beta) n} * prod_{i: c_i > 0} (beta - alpha_i)^{alpha_i n},
// with 0^0 = 1. Returns 0 at consensus and 1 at the all-undecided state.
double p_bot_exact(const OpinionCounts& state);

}  // namespace usd
