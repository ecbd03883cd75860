// Scalar observables of a configuration (decided fraction, l2/l3/l4 power
// sums, drift potentials, plurality gaps), the opinion strength
// classification, and a first-hitting-time tracker for the canonical
// threshold events.
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "usd/types.hpp"

namespace usd {

// All per-state scalars. Degenerate conventions: the beta-normalized
// quantities are 0 when beta == 0, and md is 0 when alpha_max == 0.
struct QuantitySnapshot {
    double beta = 0.0;
    double gamma = 0.0;            // ||alpha||_2^2
    double psi = 0.0;              // beta(2 beta - 1) - gamma
    double gamma_tilde = 0.0;      // gamma / beta^2
    double alpha_max = 0.0;
    double alpha_max_tilde = 0.0;  // alpha_max / beta
    double alpha_second = 0.0;     // largest alpha over opinions != argmax
    int argmax = 0;                // smallest index attaining alpha_max; 0 if none
    double p3 = 0.0;               // ||alpha||_3^3
    double p4 = 0.0;               // ||alpha||_4^4
    double md = 0.0;               // sum_i (alpha_i / alpha_max)^2
    std::uint64_t alive = 0;       // decided opinions with positive count
    std::uint64_t k = 0;           // number of decided opinion slots
};

QuantitySnapshot snapshot(const OpinionCounts& state);

// Biased gap alpha_i - (1 + eps) * alpha_j between two distinct opinions.
double gap(const OpinionCounts& state, int i, int j, double eps);

// Threshold constants. The x-thresholds default to the natural-log forms
// below; the multiplicative constants default to the fixed values used by
// the strength classification and the hitting-time events.
struct ThresholdSet {
    double x_beta = 0.0;   // (ln n)^{3/5} / sqrt(n)
    double x_psi = 0.0;    // x_beta / 4
    double x_gamma = 0.0;  // (ln n)^2 / sqrt(n)
    double x_eta = 0.0;    // (ln n)^{4/5} / sqrt(n)
    double c_weak = 0.1;
    double c_strong = 0.05;
    double c_eta = 0.05 / 0.95;  // c_strong / (1 - c_strong)
    double c_max_up = 0.1;
    double c_max_down = 0.1;
    double c_tmax_up = 0.1;
    double c_tmax_down = 0.1;
    double c_delta_up = 0.1;
    double c_delta_down = 0.1;
    double c_delta_plus = 0.001;

    static ThresholdSet defaults_for(std::uint64_t n) {
        ThresholdSet t;
        const double nd = static_cast<double>(n);
        const double ln = std::log(nd);
        const double rtn = std::sqrt(nd);
        t.x_beta = std::pow(ln, 0.6) / rtn;
        t.x_psi = t.x_beta / 4.0;
        t.x_gamma = ln * ln / rtn;
        t.x_eta = std::pow(ln, 0.8) / rtn;
        return t;
    }
};

// Gap of opinion j to the current plurality: alpha_max - (1 + c_eta) alpha_j,
// with the plurality index tie-broken to the smallest index. 0 on the
// all-undecided state.
double eta(const OpinionCounts& state, int j, const ThresholdSet& thresholds);

enum class OpinionStrength { Weak, Strong, Neither };

// Weak iff alpha_i <= (1 - c_weak) alpha_max; strong iff
// alpha_i >= (1 - c_strong) alpha_max.
OpinionStrength classify_opinion(const OpinionCounts& state, int i, const ThresholdSet& thresholds);

enum class StopEvent {
    BetaPlus,      //  beta >= 1/2 - x_beta
    BetaMinus,     //  beta <  1/2 - x_beta
    PsiPlus,       //  psi  >  x_psi
    PsiMinus,      //  psi  <= x_psi
    GammaPlus,     //  gamma >= x_gamma
    MaxUp,         //  alpha_max >= (1 + c_max_up)   * baseline
    MaxDown,       //  alpha_max <= (1 - c_max_down) * baseline
    TildeMaxUp,    //  alpha_max_tilde >= (1 + c_tmax_up)   * baseline
    TildeMaxDown,  //  alpha_max_tilde <= (1 - c_tmax_down) * baseline
    UniqueStrong,  //  min_{j != argmax} eta(j) >= x_eta
};

std::string stop_event_name(StopEvent e);

// Tracks first-hitting steps of the threshold events along one trajectory.
// The first update() establishes the multiplicative baselines; each event
// fires at most once. Not thread-safe; one tracker per trajectory.
class StoppingTracker {
  public:
    explicit StoppingTracker(ThresholdSet thresholds) : thresholds_(thresholds) {}

    // Feed snapshots in strictly increasing step order; returns the events
    // that fired at this step.
    std::vector<StopEvent> update(std::uint64_t step, const QuantitySnapshot& snap);

    bool has_fired(StopEvent e) const { return fired_[index(e)]; }
    // Step at which the event fired; valid only if has_fired().
    std::uint64_t fired_at(StopEvent e) const { return fired_step_[index(e)]; }

  private:
    static constexpr int kNumEvents = 10;
    static int index(StopEvent e) { return static_cast<int>(e); }

    ThresholdSet thresholds_;
    bool started_ = false;
    bool has_last_step_ = false;
    std::uint64_t last_step_ = 0;
    double baseline_max_ = 0.0;
    double baseline_tmax_ = 0.0;
    bool fired_[kNumEvents] = {};
    std::uint64_t fired_step_[kNumEvents] = {};
};

}  // namespace usd
