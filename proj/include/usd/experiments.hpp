// Initial-configuration generators, seeded batch trial running with
// optional trajectory recording, order-statistic estimators, and the
// experiment suites (scaling, first-round collapse, drift verification).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "usd/analytic.hpp"
#include "usd/dynamics.hpp"
#include "usd/quantities.hpp"
#include "usd/types.hpp"

namespace usd::experiments {

struct InitSpec {
    enum class Kind { BalancedDecided, BalancedHalf, LowerBound, Explicit };
    Kind kind = Kind::BalancedDecided;
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    double c = 0.1;  // LowerBound constant, 0 < c < 1/2
    std::vector<std::uint64_t> counts;  // Explicit
    std::uint64_t undecided = 0;        // Explicit
};

// BalancedDecided: all n vertices decided, counts as equal as possible
//   (remainder spread over the lowest indices).
// BalancedHalf: floor(n/2) decided vertices spread as equally as possible,
//   the rest undecided.
// LowerBound: the half-decided worst-case family. With
//   k_star = ceil(2 sqrt(n) / (c ln n)): for k <= k_star every opinion gets
//   an equal share of floor(n/2); for k > k_star opinions 1..k_star get
//   floor(n/(2 k_star) - (k - k_star)/k_star) vertices each and the
//   remaining opinions one vertex each, so every opinion is supported and
//   the decided fraction stays near 1/2.
OpinionCounts make_init(const InitSpec& spec);

std::uint64_t lower_bound_k_star(std::uint64_t n, double c);

struct TrialRecord {
    std::uint64_t trial = 0;
    TrialOutcome outcome = TrialOutcome::Timeout;
    int winner = 0;
    std::uint64_t steps = 0;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
};

struct TrajectoryRow {
    std::uint64_t trial = 0;
    std::uint64_t step = 0;
    QuantitySnapshot snap;
    std::string events;  // ';'-joined events fired since the previous row
};

struct BatchResult {
    std::vector<TrialRecord> records;
    std::vector<TrajectoryRow> rows;
};

// Runs `trials` independent seeded trials (stream_id = stream_offset +
// trial). Trajectory rows are recorded every `record_every` steps when
// nonzero, always including step 0 and the final step; stopping events are
// tracked every step. Results are keyed by trial index, so the output is
// identical for any thread count.
BatchResult run_batch(Model model, const InitSpec& init, std::uint64_t trials, std::uint64_t master_seed,
                      std::uint64_t max_steps, std::uint64_t record_every = 0, int threads = 1,
                      std::uint64_t stream_offset = 0);

// Exact order statistics with the lower convention: element at index
// floor(q * (m - 1)) of the sorted sample.
double lower_quantile(std::vector<double> values, double q);
double lower_median(std::vector<double> values);

// Least-squares slope of ln(y) against ln(x).
double loglog_slope(const std::vector<std::pair<double, double>>& points);

struct ScalingRow {
    std::uint64_t k = 0;
    std::uint64_t trials = 0;
    double success_rate = 0.0;
    double median_steps = 0.0;  // success-conditioned
    double q10 = 0.0;
    double q90 = 0.0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    std::vector<std::uint64_t> slope_ks;
    double slope = 0.0;  // log-log slope of median vs k over slope_ks
};

// Success-conditioned consensus-time statistics per k. Slope is fitted over
// `slope_ks` (defaults to all ks with a positive median).
ScalingResult scaling_suite(Model model, std::uint64_t n, const std::vector<std::uint64_t>& k_list,
                            InitSpec::Kind init_kind, std::uint64_t trials, std::uint64_t master_seed,
                            std::uint64_t max_steps, std::vector<std::uint64_t> slope_ks = {}, int threads = 1);

struct CollapseResult {
    std::uint64_t n = 0, k = 0, trials = 0;
    double gamma0 = 0.0;
    double mean_beta1 = 0.0;
    double stderr_beta1 = 0.0;
    double surviving_bound = 0.0;        // n * gamma0 * ln n
    double frac_surviving_within = 0.0;  // fraction of trials with alive_1 <= bound
    double allbot_rate = 0.0;
    double p_bot = 0.0;  // exact first-round all-undecided probability
};

// One gossip round per trial from the all-decided balanced configuration.
CollapseResult collapse_suite(std::uint64_t n, std::uint64_t k, std::uint64_t trials, std::uint64_t master_seed);

// One verification check: lhs <relation> rhs within tolerance.
struct CheckRow {
    std::string name;
    Model model = Model::Gossip;
    std::uint64_t n = 0;
    std::string id;  // k or state id, per the verify.csv schema
    double lhs = 0.0;
    double rhs = 0.0;
    std::string relation;  // "eq", "le", "ge"
    double tolerance = 0.0;
    bool hypothesis_ok = true;
    bool pass = true;
};

struct StateSamplerSpec {
    std::uint64_t count = 200;
    std::uint64_t n_min = 2, n_max = 100000;
    std::uint64_t k_min = 1, k_max = 64;
    // Fraction of states drawn from the constrained sampler that satisfies
    // the drift hypotheses (beta in the gate band, gamma below the gate).
    double hypothesis_fraction = 0.25;
};

// Seeded random count states; the constrained sub-batch exercises the
// hypothesis-gated bounds.
std::vector<OpinionCounts> sample_states(const StateSamplerSpec& spec, const HypothesisParams& params,
                                         std::uint64_t seed);

struct DriftOptions {
    std::uint64_t mc_samples = 100000;  // statistical path (gossip, n > 8)
    double rel_tol = 1e-9;              // equality tolerance, exact paths
    double sigmas = 4.0;                // band width, statistical paths
};

// Checks every moment equality and every inequality of the bound report on
// each state. Pairwise-model left sides are exact via the class-pair
// distribution at any n; gossip left sides are exact via exhaustive
// enumeration for n <= 8 and Monte Carlo otherwise.
std::vector<CheckRow> drift_suite(Model model, const std::vector<OpinionCounts>& states,
                                  const HypothesisParams& params, const DriftOptions& options,
                                  std::uint64_t master_seed);

}  // namespace usd::experiments
