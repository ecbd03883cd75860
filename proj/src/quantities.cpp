#include "usd/quantities.hpp"

#include <stdexcept>

#include "usd/numeric.hpp"

namespace usd {

QuantitySnapshot snapshot(const OpinionCounts& state) {
    check_valid(state);
    const double n = static_cast<double>(state.n());
    QuantitySnapshot s;
    s.k = state.k();

    std::uint64_t max_count = 0;
    std::uint64_t second_count = 0;
    std::size_t argmax = 0;
    KahanSum gamma, p3, p4;
    for (std::size_t i = 0; i < state.k(); ++i) {
        const std::uint64_t c = state.counts[i];
        if (c == 0) continue;
        ++s.alive;
        const double a = static_cast<double>(c) / n;
        gamma.add(a * a);
        p3.add(a * a * a);
        p4.add(a * a * a * a);
        if (c > max_count) {
            second_count = max_count;
            max_count = c;
            argmax = i + 1;
        } else if (c > second_count) {
            second_count = c;
        }
    }
    s.beta = static_cast<double>(state.decided_total()) / n;
    s.gamma = gamma.value();
    s.p3 = p3.value();
    s.p4 = p4.value();
    s.psi = s.beta * (2.0 * s.beta - 1.0) - s.gamma;
    s.alpha_max = static_cast<double>(max_count) / n;
    s.alpha_second = static_cast<double>(second_count) / n;
    s.argmax = static_cast<int>(argmax);
    if (s.beta > 0.0) {
        s.gamma_tilde = s.gamma / (s.beta * s.beta);
        s.alpha_max_tilde = s.alpha_max / s.beta;
    }
    if (max_count > 0) {
        KahanSum md;
        const double cm = static_cast<double>(max_count);
        for (std::size_t i = 0; i < state.k(); ++i) {
            if (state.counts[i] == 0) continue;
            const double r = static_cast<double>(state.counts[i]) / cm;
            md.add(r * r);
        }
        s.md = md.value();
    }
    return s;
}

double gap(const OpinionCounts& state, int i, int j, double eps) {
    if (i == j) throw std::invalid_argument("gap: i and j must be distinct");
    if (i < 1 || j < 1 || static_cast<std::size_t>(i) > state.k() || static_cast<std::size_t>(j) > state.k())
        throw std::out_of_range("gap: opinion index out of range");
    return state.alpha(i) - (1.0 + eps) * state.alpha(j);
}

double eta(const OpinionCounts& state, int j, const ThresholdSet& thresholds) {
    if (j < 1 || static_cast<std::size_t>(j) > state.k()) throw std::out_of_range("eta: opinion index out of range");
    const QuantitySnapshot s = snapshot(state);
    if (s.argmax == 0) return 0.0;
    return s.alpha_max - (1.0 + thresholds.c_eta) * state.alpha(j);
}

OpinionStrength classify_opinion(const OpinionCounts& state, int i, const ThresholdSet& thresholds) {
    if (i < 1 || static_cast<std::size_t>(i) > state.k())
        throw std::out_of_range("classify_opinion: opinion index out of range");
    const QuantitySnapshot s = snapshot(state);
    const double a = state.alpha(i);
    if (a >= (1.0 - thresholds.c_strong) * s.alpha_max) return OpinionStrength::Strong;
    if (a <= (1.0 - thresholds.c_weak) * s.alpha_max) return OpinionStrength::Weak;
    return OpinionStrength::Neither;
}

std::string stop_event_name(StopEvent e) {
    switch (e) {
        case StopEvent::BetaPlus: return "beta_plus";
        case StopEvent::BetaMinus: return "beta_minus";
        case StopEvent::PsiPlus: return "psi_plus";
        case StopEvent::PsiMinus: return "psi_minus";
        case StopEvent::GammaPlus: return "gamma_plus";
        case StopEvent::MaxUp: return "max_up";
        case StopEvent::MaxDown: return "max_down";
        case StopEvent::TildeMaxUp: return "tmax_up";
        case StopEvent::TildeMaxDown: return "tmax_down";
        case StopEvent::UniqueStrong: return "unique_strong";
    }
    return "?";
}

std::vector<StopEvent> StoppingTracker::update(std::uint64_t step, const QuantitySnapshot& snap) {
    if (has_last_step_ && step <= last_step_) throw std::invalid_argument("StoppingTracker: step indices must increase");
    last_step_ = step;
    has_last_step_ = true;
    if (!started_) {
        started_ = true;
        baseline_max_ = snap.alpha_max;
        baseline_tmax_ = snap.alpha_max_tilde;
    }

    std::vector<StopEvent> newly;
    auto hit = [&](StopEvent e, bool condition) {
        const int idx = index(e);
        if (condition && !fired_[idx]) {
            fired_[idx] = true;
            fired_step_[idx] = step;
            newly.push_back(e);
        }
    };

    hit(StopEvent::BetaPlus, snap.beta >= 0.5 - thresholds_.x_beta);
    hit(StopEvent::BetaMinus, snap.beta < 0.5 - thresholds_.x_beta);
    hit(StopEvent::PsiPlus, snap.psi > thresholds_.x_psi);
    hit(StopEvent::PsiMinus, snap.psi <= thresholds_.x_psi);
    hit(StopEvent::GammaPlus, snap.gamma >= thresholds_.x_gamma);
    hit(StopEvent::MaxUp, snap.alpha_max >= (1.0 + thresholds_.c_max_up) * baseline_max_);
    hit(StopEvent::MaxDown, snap.alpha_max <= (1.0 - thresholds_.c_max_down) * baseline_max_);
    hit(StopEvent::TildeMaxUp, snap.alpha_max_tilde >= (1.0 + thresholds_.c_tmax_up) * baseline_tmax_);
    hit(StopEvent::TildeMaxDown, snap.alpha_max_tilde <= (1.0 - thresholds_.c_tmax_down) * baseline_tmax_);
    // min over j != argmax of eta(j) = alpha_max - (1 + c_eta) * alpha_second,
    // where dead opinions contribute eta = alpha_max. With k == 1 the minimum
    // ranges over an empty set and the event fires immediately.
    if (snap.argmax != 0) {
        const bool unique_strong =
            snap.k <= 1 || snap.alpha_max - (1.0 + thresholds_.c_eta) * snap.alpha_second >= thresholds_.x_eta;
        hit(StopEvent::UniqueStrong, unique_strong);
    }
    return newly;
}

}  // namespace usd
