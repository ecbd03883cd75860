#include "usd/analytic.hpp"

#include <cmath>
#include <stdexcept>

#include "usd/numeric.hpp"

namespace usd {
namespace {

void check_pairs(const OpinionCounts& state, const std::vector<PairSpec>& pairs) {
    for (const PairSpec& p : pairs) {
        if (p.i == p.j) throw std::invalid_argument("pair indices must be distinct");
        if (p.i < 1 || p.j < 1 || static_cast<std::size_t>(p.i) > state.k() ||
            static_cast<std::size_t>(p.j) > state.k())
            throw std::out_of_range("pair opinion index out of range");
    }
}

}  // namespace

MomentReport exact_moments_gossip(const OpinionCounts& state, const std::vector<PairSpec>& pairs) {
    check_valid(state);
    check_pairs(state, pairs);
    const QuantitySnapshot s = snapshot(state);
    const double n = static_cast<double>(state.n());
    const double beta = s.beta;

    MomentReport r;
    r.model = Model::Gossip;
    r.mean_alpha.resize(state.k());
    r.var_alpha.resize(state.k());
    r.cov_alpha_beta.resize(state.k());
    for (std::size_t idx = 0; idx < state.k(); ++idx) {
        const double a = static_cast<double>(state.counts[idx]) / n;
        r.mean_alpha[idx] = a * (a + 2.0 * (1.0 - beta));
        r.var_alpha[idx] = a / n * ((1.0 - beta) * (1.0 + beta - 2.0 * a) + a * (beta - a));
        r.cov_alpha_beta[idx] = a / n * ((1.0 - beta) * (1.0 - a) + a * (beta - a));
    }
    r.mean_beta = 2.0 * beta * (1.0 - beta) + s.gamma;
    r.var_beta = ((beta - s.gamma) * (1.0 - beta + s.gamma) + s.gamma * s.gamma - s.p3) / n;
    r.var_beta_is_bound = false;
    r.has_mean_gamma = false;

    r.mean_delta.reserve(pairs.size());
    r.cov_alpha_ij.reserve(pairs.size());
    for (const PairSpec& p : pairs) {
        const double ai = state.alpha(p.i);
        const double aj = state.alpha(p.j);
        const double delta = ai - (1.0 + p.eps) * aj;
        r.mean_delta.push_back(delta * (ai + aj + 2.0 * (1.0 - beta)) + p.eps * ai * aj);
        r.cov_alpha_ij.push_back(-ai * aj * (1.0 - beta) / n);
    }
    return r;
}

MomentReport exact_moments_pp(const OpinionCounts& state, const std::vector<PairSpec>& pairs) {
    check_valid(state);
    check_pairs(state, pairs);
    const QuantitySnapshot s = snapshot(state);
    const double n = static_cast<double>(state.n());
    const double beta = s.beta;

    MomentReport r;
    r.model = Model::PP;
    r.mean_alpha.resize(state.k());
    r.var_alpha.resize(state.k());
    r.cov_alpha_beta.resize(state.k());
    const double beta_drift = (beta * (1.0 - 2.0 * beta) + s.gamma) / n;
    for (std::size_t idx = 0; idx < state.k(); ++idx) {
        const double a = static_cast<double>(state.counts[idx]) / n;
        const double drift = 1.0 - 2.0 * beta + a;  // alpha step drift factor
        r.mean_alpha[idx] = a * (1.0 + drift / n);
        r.var_alpha[idx] = a / (n * n) * (1.0 - a - a * drift * drift);
        // Cov[alpha'_i, beta'] = E[d_i d_beta] - E[d_i] E[d_beta], where the
        // alpha and beta increments move together (+-1/n) whenever alpha_i moves.
        r.cov_alpha_beta[idx] = a * (1.0 - a) / (n * n) - (a * drift / n) * beta_drift;
    }
    r.mean_beta = beta + beta_drift;
    r.var_beta = (beta - s.gamma) / (n * n);
    r.var_beta_is_bound = true;
    r.mean_gamma = s.gamma + 2.0 / n * ((1.0 - 2.0 * beta) * s.gamma + s.p3) + (beta - s.gamma) / (n * n);
    r.has_mean_gamma = true;

    r.mean_delta.reserve(pairs.size());
    r.cov_alpha_ij.reserve(pairs.size());
    for (const PairSpec& p : pairs) {
        const double ai = state.alpha(p.i);
        const double aj = state.alpha(p.j);
        const double delta = ai - (1.0 + p.eps) * aj;
        r.mean_delta.push_back(delta * (1.0 + (ai + aj + 1.0 - 2.0 * beta) / n) + p.eps * ai * aj / n);
        // The two opinion counts never move in the same interaction, so the
        // covariance is minus the product of the increment means.
        const double di = ai * (1.0 - 2.0 * beta + ai) / n;
        const double dj = aj * (1.0 - 2.0 * beta + aj) / n;
        r.cov_alpha_ij.push_back(-di * dj);
    }
    return r;
}

BoundReport bound_report(Model model, const OpinionCounts& state, const HypothesisParams& params) {
    check_valid(state);
    const QuantitySnapshot s = snapshot(state);
    const std::uint64_t n_int = state.n();
    const double n = static_cast<double>(n_int);
    const double beta = s.beta;
    const double gamma = s.gamma;

    const bool n_ok = n_int >= params.n_min;
    const bool beta_ok = beta >= params.beta_min;
    const bool psi_ok = s.psi <= params.psi_max;
    const bool gamma_ok = gamma <= params.gamma_max;

    BoundReport report;
    report.model = model;
    auto add = [&](const std::string& name, BoundLhs lhs, Relation rel, double rhs, bool hyp) {
        report.entries.push_back({name, lhs, rel, rhs, hyp});
    };

    if (model == Model::Gossip) {
        add("exp_gamma_upper", BoundLhs::MeanGamma, Relation::LE, 10.0 * gamma, true);
        const double mean_beta = 2.0 * beta * (1.0 - beta) + gamma;
        add("exp_gamma_product_lower", BoundLhs::MeanGammaTimesBeta2, Relation::GE,
            mean_beta * mean_beta * gamma + beta * beta * beta * (1.0 - beta) * (1.0 - beta) / n, true);
        add("exp_psi_upper", BoundLhs::MeanPsi, Relation::LE, beta / n, true);
        if (beta > 0.0) {
            const double denom = 2.0 * (1.0 - beta) + gamma / beta;
            const double rhs = s.alpha_max_tilde * (1.0 + (s.alpha_max - gamma / beta) / denom) - 9.0 * s.alpha_max / n;
            add("max_ratio_drift_lower", BoundLhs::MeanTnpm, Relation::GE, rhs, n_ok && beta_ok && psi_ok);
        } else {
            add("max_ratio_drift_lower", BoundLhs::MeanTnpm, Relation::GE, 0.0, false);
        }
        add("gamma_ratio_drift_lower", BoundLhs::MeanTnpt, Relation::GE, s.gamma_tilde + 1.0 / (12.0 * n),
            n_ok && beta_ok && psi_ok && gamma_ok);
    } else {
        add("var_beta_upper", BoundLhs::VarBeta, Relation::LE, (beta - gamma) / (n * n), true);
        add("var_gamma_upper", BoundLhs::VarGamma, Relation::LE, 9.0 * s.p3 / (n * n), true);
        add("exp_psi_decay_upper", BoundLhs::MeanPsi, Relation::LE,
            s.psi * (1.0 - 1.0 / n) + (beta - gamma) / (n * n), true);
        if (beta > 0.0) {
            const double rhs =
                s.alpha_max_tilde * (1.0 + (s.alpha_max - gamma / beta) / (2.0 * n)) - 18.0 * s.alpha_max / (n * n);
            add("max_ratio_drift_lower", BoundLhs::MeanTnpm, Relation::GE, rhs, n_ok && beta_ok);
        } else {
            add("max_ratio_drift_lower", BoundLhs::MeanTnpm, Relation::GE, 0.0, false);
        }
        add("gamma_ratio_drift_lower", BoundLhs::MeanTnpt, Relation::GE, s.gamma_tilde + 1.0 / (12.0 * n * n),
            n_ok && beta_ok && gamma_ok);
    }
    return report;
}

double p_bot_exact(const OpinionCounts& state) {
    check_valid(state);
    const StateClass cls = classify_state(state);
    if (cls.kind == StateClass::Kind::Consensus) return 0.0;
    if (cls.kind == StateClass::Kind::AllUndecided) return 1.0;

    const std::uint64_t n = state.n();
    const std::uint64_t decided = state.decided_total();
    const double nd = static_cast<double>(n);
    // log p = (1-beta) n * log(1-beta) + sum_i c_i * log(beta - alpha_i),
    // skipping zero-exponent factors (0^0 = 1).
    KahanSum log_p;
    if (state.undecided > 0) {
        log_p.add(static_cast<double>(state.undecided) *
                  std::log(static_cast<double>(state.undecided) / nd));
    }
    for (std::size_t idx = 0; idx < state.k(); ++idx) {
        const std::uint64_t c = state.counts[idx];
        if (c == 0) continue;
        if (decided == c) return 0.0;  // lone decided opinion can never cancel
        log_p.add(static_cast<double>(c) * std::log(static_cast<double>(decided - c) / nd));
    }
    return std::exp(log_p.value());
}

}  // namespace usd
