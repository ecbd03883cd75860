#include "usd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <boost/multiprecision/cpp_int.hpp>

#include "usd/dynamics.hpp"
#include "usd/numeric.hpp"
#include "usd/quantities.hpp"

namespace usd::oracle {
namespace {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

BigInt binom_coeff(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    BigInt r = 1;
    for (std::uint64_t i = 0; i < k; ++i) {
        r *= (n - i);
        r /= (i + 1);
    }
    return r;
}

Rational rational_pow(const Rational& base, std::uint64_t e) {
    Rational r = 1;
    for (std::uint64_t i = 0; i < e; ++i) r *= base;
    return r;
}

// Binomial pmf in doubles via log-gamma; exact at the p = 0 / 1 edges.
double binom_pmf(std::uint64_t c, double p, std::uint64_t s) {
    if (p <= 0.0) return s == 0 ? 1.0 : 0.0;
    if (p >= 1.0) return s == c ? 1.0 : 0.0;
    const double cd = static_cast<double>(c), sd = static_cast<double>(s);
    const double lg = std::lgamma(cd + 1.0) - std::lgamma(sd + 1.0) - std::lgamma(cd - sd + 1.0);
    return std::exp(lg + sd * std::log(p) + (cd - sd) * std::log1p(-p));
}

void sort_outcomes(OneStepDistribution& dist) {
    std::sort(dist.outcomes.begin(), dist.outcomes.end(), [](const Outcome& a, const Outcome& b) {
        if (a.counts != b.counts) return a.counts < b.counts;
        return a.undecided < b.undecided;
    });
}

}  // namespace

OneStepDistribution gossip_onestep_exhaustive(const OpinionCounts& state) {
    check_valid(state);
    const std::uint64_t n = state.n();
    if (n > 8) throw std::invalid_argument("gossip_onestep_exhaustive: n must be <= 8");
    const std::size_t k = state.k();

    // Vertex class labels, 0..k-1 decided, k undecided.
    std::vector<std::uint8_t> cls;
    cls.reserve(n);
    for (std::size_t i = 0; i < k; ++i)
        for (std::uint64_t c = 0; c < state.counts[i]; ++c) cls.push_back(static_cast<std::uint8_t>(i));
    for (std::uint64_t c = 0; c < state.undecided; ++c) cls.push_back(static_cast<std::uint8_t>(k));

    // Next opinion of a vertex of class a pulling a vertex of class b.
    auto next_class = [&](std::uint8_t a, std::uint8_t b) -> std::uint8_t {
        if (a == k) return b;
        if (b == k || b == a) return a;
        return static_cast<std::uint8_t>(k);
    };

    // Odometer over pulled-vertex indices with incremental class counts;
    // every joint choice has the same weight n^{-n}, so integer outcome
    // counts are exact.
    std::vector<std::uint8_t> digit(n, 0);
    std::vector<std::uint8_t> nxt(n);
    std::vector<std::uint32_t> next_counts(k + 1, 0);
    for (std::uint64_t v = 0; v < n; ++v) {
        nxt[v] = next_class(cls[v], cls[0]);
        ++next_counts[nxt[v]];
    }

    const bool packable = (k + 1) * 4 <= 64;
    std::unordered_map<std::uint64_t, std::uint64_t> packed_hits;
    std::map<std::vector<std::uint64_t>, std::uint64_t> generic_hits;
    if (packable) packed_hits.reserve(4096);

    auto record = [&]() {
        if (packable) {
            std::uint64_t key = 0;
            for (std::size_t i = 0; i < k; ++i) key |= static_cast<std::uint64_t>(next_counts[i]) << (4 * i);
            ++packed_hits[key];
        } else {
            std::vector<std::uint64_t> key(next_counts.begin(), next_counts.begin() + static_cast<std::ptrdiff_t>(k));
            ++generic_hits[key];
        }
    };

    double total = 1.0;
    for (std::uint64_t v = 0; v < n; ++v) total *= static_cast<double>(n);

    for (;;) {
        record();
        // Increment the odometer.
        std::uint64_t pos = 0;
        while (pos < n) {
            std::uint8_t& d = digit[pos];
            if (static_cast<std::uint64_t>(d) + 1 < n) {
                ++d;
                const std::uint8_t nn = next_class(cls[pos], cls[d]);
                --next_counts[nxt[pos]];
                ++next_counts[nn];
                nxt[pos] = nn;
                break;
            }
            d = 0;
            const std::uint8_t nn = next_class(cls[pos], cls[0]);
            --next_counts[nxt[pos]];
            ++next_counts[nn];
            nxt[pos] = nn;
            ++pos;
        }
        if (pos == n) break;
    }

    OneStepDistribution dist;
    dist.provenance = OneStepDistribution::Provenance::GossipExhaustive;
    auto emit = [&](std::vector<std::uint64_t> counts, std::uint64_t hits) {
        std::uint64_t decided = 0;
        for (std::uint64_t c : counts) decided += c;
        dist.outcomes.push_back({std::move(counts), n - decided, static_cast<double>(hits) / total});
    };
    if (packable) {
        for (const auto& [key, hits] : packed_hits) {
            std::vector<std::uint64_t> counts(k);
            for (std::size_t i = 0; i < k; ++i) counts[i] = (key >> (4 * i)) & 0xF;
            emit(std::move(counts), hits);
        }
    } else {
        for (const auto& [key, hits] : generic_hits) emit(key, hits);
    }
    sort_outcomes(dist);
    return dist;
}

OneStepDistribution gossip_onestep_rows(const OpinionCounts& state) {
    check_valid(state);
    const std::uint64_t n = state.n();
    const double nd = static_cast<double>(n);
    const std::uint64_t u0 = state.undecided;
    const auto alive = alive_classes(state);

    OneStepDistribution dist;
    dist.provenance = OneStepDistribution::Provenance::GossipRows;

    std::vector<std::uint64_t> next(state.k(), 0);
    // Depth-first over classes: choose the binomial survivor count and the
    // share of undecided adopters for each class, multiplying pmfs.
    auto rec = [&](auto&& self, std::size_t pos, std::uint64_t und_left, std::uint64_t weight_left,
                   double prob) -> void {
        if (pos == alive.size()) {
            std::uint64_t decided = 0;
            for (std::uint64_t c : next) decided += c;
            dist.outcomes.push_back({next, n - decided, prob});
            return;
        }
        const std::size_t idx = alive[pos];
        const std::uint64_t c = state.counts[idx];
        const double p_keep = static_cast<double>(c + u0) / nd;
        const double p_adopt = static_cast<double>(c) / static_cast<double>(weight_left);
        for (std::uint64_t s = 0; s <= c; ++s) {
            const double ps = binom_pmf(c, p_keep, s);
            for (std::uint64_t x = 0; x <= und_left; ++x) {
                const double px = binom_pmf(und_left, p_adopt, x);
                next[idx] = s + x;
                self(self, pos + 1, und_left - x, weight_left - c, prob * ps * px);
            }
        }
        next[idx] = 0;
    };
    rec(rec, 0, u0, n, 1.0);

    // Merge duplicate count vectors produced by different (s, x) splits.
    std::map<std::pair<std::vector<std::uint64_t>, std::uint64_t>, double> merged;
    for (auto& o : dist.outcomes) merged[{o.counts, o.undecided}] += o.prob;
    dist.outcomes.clear();
    for (auto& [key, prob] : merged) dist.outcomes.push_back({key.first, key.second, prob});
    sort_outcomes(dist);
    return dist;
}

OneStepDistribution pp_onestep_exact(const OpinionCounts& state) {
    check_valid(state);
    const std::uint64_t n = state.n();
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    const std::uint64_t dec = state.decided_total();
    const std::uint64_t u = state.undecided;

    OneStepDistribution dist;
    dist.provenance = OneStepDistribution::Provenance::PPExact;
    double moved = 0.0;
    for (std::size_t i = 0; i < state.k(); ++i) {
        const std::uint64_t c = state.counts[i];
        if (c == 0) continue;
        // Initiator of class i meets a differently decided responder.
        if (dec > c) {
            const double p = static_cast<double>(c) * static_cast<double>(dec - c) / n2;
            auto counts = state.counts;
            --counts[i];
            dist.outcomes.push_back({std::move(counts), u + 1, p});
            moved += p;
        }
        // Undecided initiator meets a responder of class i.
        if (u > 0) {
            const double p = static_cast<double>(u) * static_cast<double>(c) / n2;
            auto counts = state.counts;
            ++counts[i];
            dist.outcomes.push_back({std::move(counts), u - 1, p});
            moved += p;
        }
    }
    dist.outcomes.push_back({state.counts, u, 1.0 - moved});
    sort_outcomes(dist);
    return dist;
}

OracleMoments moments_of(const OneStepDistribution& dist, const std::vector<PairSpec>& pairs) {
    if (dist.outcomes.empty()) throw std::invalid_argument("moments_of: empty distribution");
    const std::size_t k = dist.outcomes.front().counts.size();

    std::vector<KahanSum> ea(k), ea2(k), eab(k);
    KahanSum eb, eb2, eg, eg2, epsi, egt, etm, em;
    std::vector<KahanSum> ed(pairs.size()), eij(pairs.size());
    KahanSum allbot;

    for (const Outcome& o : dist.outcomes) {
        const OpinionCounts next{o.counts, o.undecided};
        const QuantitySnapshot s = snapshot(next);
        const double p = o.prob;
        const double n = static_cast<double>(next.n());
        for (std::size_t i = 0; i < k; ++i) {
            const double a = static_cast<double>(o.counts[i]) / n;
            ea[i].add(p * a);
            ea2[i].add(p * a * a);
            eab[i].add(p * a * s.beta);
        }
        eb.add(p * s.beta);
        eb2.add(p * s.beta * s.beta);
        eg.add(p * s.gamma);
        eg2.add(p * s.gamma * s.gamma);
        epsi.add(p * s.psi);
        egt.add(p * s.gamma_tilde);
        etm.add(p * s.alpha_max_tilde);
        em.add(p * s.alpha_max);
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            const double ai = static_cast<double>(o.counts[static_cast<std::size_t>(pairs[q].i - 1)]) / n;
            const double aj = static_cast<double>(o.counts[static_cast<std::size_t>(pairs[q].j - 1)]) / n;
            ed[q].add(p * (ai - (1.0 + pairs[q].eps) * aj));
            eij[q].add(p * ai * aj);
        }
        if (s.beta == 0.0) allbot.add(p);
    }

    OracleMoments m;
    m.mean_alpha.resize(k);
    m.var_alpha.resize(k);
    m.cov_alpha_beta.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        m.mean_alpha[i] = ea[i].value();
        m.var_alpha[i] = ea2[i].value() - m.mean_alpha[i] * m.mean_alpha[i];
        m.cov_alpha_beta[i] = eab[i].value() - m.mean_alpha[i] * eb.value();
    }
    m.mean_beta = eb.value();
    m.var_beta = eb2.value() - m.mean_beta * m.mean_beta;
    m.mean_gamma = eg.value();
    m.var_gamma = eg2.value() - m.mean_gamma * m.mean_gamma;
    m.mean_psi = epsi.value();
    m.mean_gamma_tilde = egt.value();
    m.mean_alpha_max_tilde = etm.value();
    m.mean_alpha_max = em.value();
    m.mean_delta.resize(pairs.size());
    m.cov_alpha_ij.resize(pairs.size());
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        m.mean_delta[q] = ed[q].value();
        const std::size_t ii = static_cast<std::size_t>(pairs[q].i - 1);
        const std::size_t jj = static_cast<std::size_t>(pairs[q].j - 1);
        m.cov_alpha_ij[q] = eij[q].value() - m.mean_alpha[ii] * m.mean_alpha[jj];
    }
    m.mass_all_bot = allbot.value();
    return m;
}

double total_variation(const OneStepDistribution& a, const OneStepDistribution& b) {
    std::map<std::pair<std::vector<std::uint64_t>, std::uint64_t>, double> diff;
    for (const Outcome& o : a.outcomes) diff[{o.counts, o.undecided}] += o.prob;
    for (const Outcome& o : b.outcomes) diff[{o.counts, o.undecided}] -= o.prob;
    double tv = 0.0;
    for (const auto& [key, d] : diff) tv += std::fabs(d);
    return tv / 2.0;
}

namespace {

// Rational transition rows, exact mirrors of the double constructions.
using RationalRow = std::vector<std::pair<std::vector<std::uint64_t>, Rational>>;

RationalRow gossip_row_rational(const OpinionCounts& state) {
    const std::uint64_t n = state.n();
    const std::uint64_t u0 = state.undecided;
    const auto alive = alive_classes(state);
    RationalRow row;
    std::vector<std::uint64_t> next(state.k(), 0);
    auto rec = [&](auto&& self, std::size_t pos, std::uint64_t und_left, std::uint64_t weight_left,
                   Rational prob) -> void {
        if (pos == alive.size()) {
            row.emplace_back(next, prob);
            return;
        }
        const std::size_t idx = alive[pos];
        const std::uint64_t c = state.counts[idx];
        const Rational p_keep(c + u0, n);
        const Rational p_adopt(c, weight_left);
        for (std::uint64_t s = 0; s <= c; ++s) {
            const Rational ps = Rational(binom_coeff(c, s)) * rational_pow(p_keep, s) * rational_pow(1 - p_keep, c - s);
            for (std::uint64_t x = 0; x <= und_left; ++x) {
                const Rational px =
                    Rational(binom_coeff(und_left, x)) * rational_pow(p_adopt, x) * rational_pow(1 - p_adopt, und_left - x);
                next[idx] = s + x;
                self(self, pos + 1, und_left - x, weight_left - c, prob * ps * px);
            }
        }
        next[idx] = 0;
    };
    rec(rec, 0, u0, n, Rational(1));
    return row;
}

RationalRow pp_row_rational(const OpinionCounts& state) {
    const std::uint64_t n = state.n();
    const std::uint64_t dec = state.decided_total();
    const std::uint64_t u = state.undecided;
    RationalRow row;
    Rational moved = 0;
    const Rational n2 = Rational(n) * Rational(n);
    for (std::size_t i = 0; i < state.k(); ++i) {
        const std::uint64_t c = state.counts[i];
        if (c == 0) continue;
        if (dec > c) {
            Rational p = Rational(c) * Rational(dec - c) / n2;
            auto counts = state.counts;
            --counts[i];
            row.emplace_back(std::move(counts), p);
            moved += p;
        }
        if (u > 0) {
            Rational p = Rational(u) * Rational(c) / n2;
            auto counts = state.counts;
            ++counts[i];
            row.emplace_back(std::move(counts), p);
            moved += p;
        }
    }
    row.emplace_back(state.counts, 1 - moved);
    return row;
}

// Dense Gaussian elimination, A X = B for several right-hand sides.
// Partial pivoting by magnitude for doubles; first-nonzero pivot for exact
// rational arithmetic.
template <typename T>
void solve_dense(std::vector<std::vector<T>>& a, std::vector<std::vector<T>>& b) {
    const std::size_t m = a.size();
    const std::size_t r = b.empty() ? 0 : b[0].size();
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        if constexpr (std::is_floating_point_v<T>) {
            for (std::size_t row = col + 1; row < m; ++row)
                if (std::fabs(a[row][col]) > std::fabs(a[pivot][col])) pivot = row;
        } else {
            while (pivot < m && a[pivot][col] == 0) ++pivot;
            if (pivot == m) throw std::runtime_error("absorption solve: singular system");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const T diag = a[col][col];
        if (diag == T(0)) throw std::runtime_error("absorption solve: singular system");
        for (std::size_t row = col + 1; row < m; ++row) {
            if (a[row][col] == T(0)) continue;
            const T f = a[row][col] / diag;
            for (std::size_t j = col; j < m; ++j) a[row][j] -= f * a[col][j];
            for (std::size_t j = 0; j < r; ++j) b[row][j] -= f * b[col][j];
        }
    }
    for (std::size_t col = m; col-- > 0;) {
        for (std::size_t j = 0; j < r; ++j) {
            T v = b[col][j];
            for (std::size_t jj = col + 1; jj < m; ++jj) v -= a[col][jj] * b[jj][j];
            b[col][j] = v / a[col][col];
        }
    }
}

template <typename T>
AbsorptionSolution absorption_impl(Model model, const OpinionCounts& start, std::uint64_t state_cap) {
    const std::uint64_t n = start.n();
    const auto alive = alive_classes(start);
    const std::size_t a = alive.size();

    // Count-state space: compositions of n into a + 1 parts. Dead opinions
    // never revive, so restricting to the initial support is exact.
    std::uint64_t num_states = 1;
    for (std::size_t i = 1; i <= a; ++i) {
        num_states = num_states * (n + i) / i;
        if (num_states > state_cap) throw std::runtime_error("exact_absorption: state-space cap exceeded");
    }

    std::vector<std::vector<std::uint64_t>> states;  // local counts per alive class
    states.reserve(num_states);
    std::vector<std::uint64_t> cur(a, 0);
    auto enumerate = [&](auto&& self, std::size_t pos, std::uint64_t left) -> void {
        if (pos == a) {
            states.push_back(cur);
            return;
        }
        for (std::uint64_t c = 0; c <= left; ++c) {
            cur[pos] = c;
            self(self, pos + 1, left - c);
        }
        cur[pos] = 0;
    };
    enumerate(enumerate, 0, n);

    std::map<std::vector<std::uint64_t>, std::size_t> index;
    for (std::size_t s = 0; s < states.size(); ++s) index[states[s]] = s;

    auto decided_of = [&](const std::vector<std::uint64_t>& st) {
        std::uint64_t d = 0;
        for (std::uint64_t c : st) d += c;
        return d;
    };
    auto local_state = [&](const std::vector<std::uint64_t>& st) {
        return OpinionCounts(st, n - decided_of(st));
    };
    auto is_fail = [&](const std::vector<std::uint64_t>& st) { return decided_of(st) == 0; };
    auto winner_of = [&](const std::vector<std::uint64_t>& st) -> int {
        for (std::size_t i = 0; i < a; ++i)
            if (st[i] == n) return static_cast<int>(i);
        return -1;
    };

    std::vector<std::size_t> transient;
    std::vector<std::ptrdiff_t> transient_id(states.size(), -1);
    for (std::size_t s = 0; s < states.size(); ++s) {
        if (!is_fail(states[s]) && winner_of(states[s]) < 0) {
            transient_id[s] = static_cast<std::ptrdiff_t>(transient.size());
            transient.push_back(s);
        }
    }

    // Immediate solution for an absorbing start.
    {
        std::vector<std::uint64_t> start_local(a);
        for (std::size_t i = 0; i < a; ++i) start_local[i] = start.counts[alive[i]];
        const std::size_t sid = index.at(start_local);
        if (transient_id[sid] < 0) {
            AbsorptionSolution sol;
            sol.num_states = states.size();
            sol.expected_steps = 0.0;
            if (is_fail(states[sid])) {
                sol.failure_probability = 1.0;
            } else {
                sol.success_probability = 1.0;
                for (std::size_t i = 0; i < a; ++i)
                    sol.winner_probabilities.emplace_back(static_cast<int>(alive[i]) + 1,
                                                          winner_of(states[sid]) == static_cast<int>(i) ? 1.0 : 0.0);
            }
            return sol;
        }
    }

    const std::size_t m = transient.size();
    const std::size_t rhs_cols = a + 2;  // winners..., failure, expected steps
    std::vector<std::vector<T>> A(m, std::vector<T>(m, T(0)));
    std::vector<std::vector<T>> B(m, std::vector<T>(rhs_cols, T(0)));

    for (std::size_t row = 0; row < m; ++row) {
        const auto& st = states[transient[row]];
        const OpinionCounts sc = local_state(st);
        A[row][row] = T(1);
        B[row][a + 1] = T(1);  // one step taken from every transient state

        auto absorb = [&](const std::vector<std::uint64_t>& to, const T& p) {
            const std::size_t tid = index.at(to);
            if (transient_id[tid] >= 0) {
                A[row][static_cast<std::size_t>(transient_id[tid])] -= p;
            } else if (is_fail(to)) {
                B[row][a] += p;
            } else {
                B[row][static_cast<std::size_t>(winner_of(to))] += p;
            }
        };

        if constexpr (std::is_floating_point_v<T>) {
            const OneStepDistribution dist =
                model == Model::Gossip ? gossip_onestep_rows(sc) : pp_onestep_exact(sc);
            for (const Outcome& o : dist.outcomes) absorb(o.counts, o.prob);
        } else {
            const RationalRow row_dist = model == Model::Gossip ? gossip_row_rational(sc) : pp_row_rational(sc);
            std::map<std::vector<std::uint64_t>, T> merged;
            for (const auto& [to, p] : row_dist) merged[to] += p;
            for (const auto& [to, p] : merged) absorb(to, p);
        }
    }

    solve_dense(A, B);

    std::vector<std::uint64_t> start_local(a);
    for (std::size_t i = 0; i < a; ++i) start_local[i] = start.counts[alive[i]];
    const std::size_t row = static_cast<std::size_t>(transient_id[index.at(start_local)]);

    AbsorptionSolution sol;
    sol.num_states = states.size();
    double success = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
        const double w = static_cast<double>(B[row][i]);
        sol.winner_probabilities.emplace_back(static_cast<int>(alive[i]) + 1, w);
        success += w;
    }
    sol.success_probability = success;
    sol.failure_probability = static_cast<double>(B[row][a]);
    sol.expected_steps = static_cast<double>(B[row][a + 1]);
    return sol;
}

}  // namespace

AbsorptionSolution exact_absorption(Model model, const OpinionCounts& start, std::uint64_t state_cap,
                                    Precision precision) {
    check_valid(start);
    if (precision == Precision::Rational) return absorption_impl<Rational>(model, start, state_cap);
    return absorption_impl<double>(model, start, state_cap);
}

EmpiricalMoments mc_onestep_moments(Model model, const OpinionCounts& state, std::uint64_t samples, Rng& rng) {
    check_valid(state);
    if (samples < 1) throw std::invalid_argument("mc_onestep_moments: samples must be >= 1");
    const std::size_t k = state.k();
    const auto alive0 = alive_classes(state);

    std::vector<KahanSum> ea(k);
    KahanSum eb, eb2, eg, eg2, epsi, epsi2, egt, egt2, etm, etm2;
    std::vector<KahanSum> ea2(k);

    OpinionCounts work = state;
    std::vector<std::size_t> alive;
    std::vector<std::uint64_t> scratch(k, 0);
    for (std::uint64_t it = 0; it < samples; ++it) {
        work = state;
        alive = alive0;
        if (model == Model::Gossip) {
            gossip_step_inplace(work, alive, scratch, rng);
        } else {
            pp_step_inplace(work, alive, rng);
        }
        const QuantitySnapshot s = snapshot(work);
        const double n = static_cast<double>(work.n());
        for (std::size_t i = 0; i < k; ++i) {
            const double a = static_cast<double>(work.counts[i]) / n;
            ea[i].add(a);
            ea2[i].add(a * a);
        }
        eb.add(s.beta);
        eb2.add(s.beta * s.beta);
        eg.add(s.gamma);
        eg2.add(s.gamma * s.gamma);
        epsi.add(s.psi);
        epsi2.add(s.psi * s.psi);
        egt.add(s.gamma_tilde);
        egt2.add(s.gamma_tilde * s.gamma_tilde);
        etm.add(s.alpha_max_tilde);
        etm2.add(s.alpha_max_tilde * s.alpha_max_tilde);
    }

    const double ns = static_cast<double>(samples);
    auto finish = [&](const KahanSum& e1, const KahanSum& e2, double& mean, double& var, double& se) {
        mean = e1.value() / ns;
        var = std::fmax(0.0, e2.value() / ns - mean * mean);
        se = std::sqrt(var / ns);
    };

    EmpiricalMoments m;
    m.samples = samples;
    m.mean_alpha.resize(k);
    m.stderr_alpha.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double mean = ea[i].value() / ns;
        const double var = std::fmax(0.0, ea2[i].value() / ns - mean * mean);
        m.mean_alpha[i] = mean;
        m.stderr_alpha[i] = std::sqrt(var / ns);
    }
    finish(eb, eb2, m.mean_beta, m.var_beta, m.stderr_beta);
    finish(eg, eg2, m.mean_gamma, m.var_gamma, m.stderr_gamma);
    double dummy_var = 0.0;
    finish(epsi, epsi2, m.mean_psi, dummy_var, m.stderr_psi);
    finish(egt, egt2, m.mean_gamma_tilde, dummy_var, m.stderr_gamma_tilde);
    finish(etm, etm2, m.mean_alpha_max_tilde, dummy_var, m.stderr_alpha_max_tilde);
    return m;
}

}  // namespace usd::oracle
