#include "usd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "usd/numeric.hpp"
#include "usd/oracle.hpp"
#include "usd/sampling.hpp"

namespace usd::experiments {

std::uint64_t lower_bound_k_star(std::uint64_t n, double c) {
    const double nd = static_cast<double>(n);
    return static_cast<std::uint64_t>(std::ceil(2.0 * std::sqrt(nd) / (c * std::log(nd))));
}

namespace {

// Spread `total` vertices as equally as possible over k opinions,
// remainder to the lowest indices.
std::vector<std::uint64_t> spread_evenly(std::uint64_t total, std::uint64_t k) {
    std::vector<std::uint64_t> counts(k, total / k);
    for (std::uint64_t i = 0; i < total % k; ++i) ++counts[i];
    return counts;
}

}  // namespace

OpinionCounts make_init(const InitSpec& spec) {
    switch (spec.kind) {
        case InitSpec::Kind::BalancedDecided: {
            if (spec.k < 1 || spec.k > spec.n) throw std::invalid_argument("make_init: need 1 <= k <= n");
            return OpinionCounts(spread_evenly(spec.n, spec.k), 0);
        }
        case InitSpec::Kind::BalancedHalf: {
            const std::uint64_t dec = spec.n / 2;
            if (spec.k < 1 || spec.k > dec) throw std::invalid_argument("make_init: need 1 <= k <= n/2");
            auto counts = spread_evenly(dec, spec.k);
            return OpinionCounts(std::move(counts), spec.n - dec);
        }
        case InitSpec::Kind::LowerBound: {
            if (!(spec.c > 0.0 && spec.c < 0.5)) throw std::invalid_argument("make_init: need 0 < c < 1/2");
            if (spec.k < 1 ||
                static_cast<double>(spec.k) > (0.5 - spec.c) * static_cast<double>(spec.n))
                throw std::invalid_argument("make_init: need 1 <= k <= (1/2 - c) n");
            const std::uint64_t k_star = lower_bound_k_star(spec.n, spec.c);
            std::vector<std::uint64_t> counts;
            if (spec.k <= k_star) {
                counts = spread_evenly(spec.n / 2, spec.k);
            } else {
                const double per_head =
                    static_cast<double>(spec.n) / (2.0 * static_cast<double>(k_star)) -
                    static_cast<double>(spec.k - k_star) / static_cast<double>(k_star);
                const std::uint64_t head = static_cast<std::uint64_t>(std::floor(per_head));
                if (per_head < 1.0) throw std::invalid_argument("make_init: infeasible lower-bound parameters");
                counts.assign(spec.k, 1);
                for (std::uint64_t i = 0; i < k_star; ++i) counts[i] = head;
            }
            std::uint64_t dec = 0;
            for (std::uint64_t c : counts) dec += c;
            if (dec > spec.n) throw std::invalid_argument("make_init: infeasible lower-bound parameters");
            return OpinionCounts(std::move(counts), spec.n - dec);
        }
        case InitSpec::Kind::Explicit: {
            OpinionCounts state(spec.counts, spec.undecided);
            check_valid(state);
            if (spec.n != 0 && state.n() != spec.n)
                throw std::invalid_argument("make_init: explicit counts do not sum to n");
            return state;
        }
    }
    throw std::invalid_argument("make_init: unknown kind");
}

namespace {

struct TrialSlot {
    TrialRecord record;
    std::vector<TrajectoryRow> rows;
};

void run_one_trial(Model model, const OpinionCounts& init, std::uint64_t master_seed, std::uint64_t stream_id,
                   std::uint64_t max_steps, std::uint64_t record_every, TrialSlot& slot, std::uint64_t trial_index) {
    Rng rng(master_seed, stream_id);
    StepObserver observer = nullptr;

    StoppingTracker tracker(ThresholdSet::defaults_for(init.n()));
    std::string pending;
    std::uint64_t last_emitted = 0;
    auto append_events = [&pending](const std::vector<StopEvent>& events) {
        for (StopEvent e : events) {
            if (!pending.empty()) pending += ';';
            pending += stop_event_name(e);
        }
    };

    QuantitySnapshot last_snap;
    std::uint64_t last_step = 0;
    if (record_every > 0) {
        const QuantitySnapshot snap0 = snapshot(init);
        append_events(tracker.update(0, snap0));
        slot.rows.push_back({trial_index, 0, snap0, pending});
        pending.clear();
        observer = [&](std::uint64_t step, const OpinionCounts& state) {
            const QuantitySnapshot snap = snapshot(state);
            append_events(tracker.update(step, snap));
            last_snap = snap;
            last_step = step;
            if (step % record_every == 0) {
                slot.rows.push_back({trial_index, step, snap, pending});
                pending.clear();
                last_emitted = step;
            }
        };
    }

    const TrialResult result = run_trial(model, init, rng, max_steps, observer);
    if (record_every > 0 && last_step > last_emitted) {
        slot.rows.push_back({trial_index, last_step, last_snap, pending});
    }
    slot.record = {trial_index, result.outcome, result.winner, result.steps, master_seed, stream_id};
}

}  // namespace

BatchResult run_batch(Model model, const InitSpec& init_spec, std::uint64_t trials, std::uint64_t master_seed,
                      std::uint64_t max_steps, std::uint64_t record_every, int threads,
                      std::uint64_t stream_offset) {
    if (trials < 1) throw std::invalid_argument("run_batch: trials must be >= 1");
    const OpinionCounts init = make_init(init_spec);
    if (max_steps == 0) max_steps = default_max_steps(model);

    std::vector<TrialSlot> slots(trials);
    const int workers = std::max(1, threads);
    if (workers == 1) {
        for (std::uint64_t t = 0; t < trials; ++t)
            run_one_trial(model, init, master_seed, stream_offset + t, max_steps, record_every, slots[t], t);
    } else {
        std::atomic<std::uint64_t> next{0};
        auto work = [&]() {
            for (;;) {
                const std::uint64_t t = next.fetch_add(1);
                if (t >= trials) return;
                run_one_trial(model, init, master_seed, stream_offset + t, max_steps, record_every, slots[t], t);
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    BatchResult result;
    result.records.reserve(trials);
    for (auto& slot : slots) {
        result.records.push_back(slot.record);
        for (auto& row : slot.rows) result.rows.push_back(std::move(row));
    }
    return result;
}

double lower_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("lower_quantile: empty sample");
    std::sort(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(values.size() - 1)));
    return values[idx];
}

double lower_median(std::vector<double> values) { return lower_quantile(std::move(values), 0.5); }

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        const double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(points.size());
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

ScalingResult scaling_suite(Model model, std::uint64_t n, const std::vector<std::uint64_t>& k_list,
                            InitSpec::Kind init_kind, std::uint64_t trials, std::uint64_t master_seed,
                            std::uint64_t max_steps, std::vector<std::uint64_t> slope_ks, int threads) {
    ScalingResult result;
    for (std::size_t ki = 0; ki < k_list.size(); ++ki) {
        InitSpec spec;
        spec.kind = init_kind;
        spec.n = n;
        spec.k = k_list[ki];
        const BatchResult batch =
            run_batch(model, spec, trials, master_seed, max_steps, 0, threads, ki * trials);
        std::vector<double> steps_ok;
        for (const TrialRecord& r : batch.records)
            if (r.outcome == TrialOutcome::Consensus) steps_ok.push_back(static_cast<double>(r.steps));
        ScalingRow row;
        row.k = k_list[ki];
        row.trials = trials;
        row.success_rate = static_cast<double>(steps_ok.size()) / static_cast<double>(trials);
        if (!steps_ok.empty()) {
            row.median_steps = lower_median(steps_ok);
            row.q10 = lower_quantile(steps_ok, 0.1);
            row.q90 = lower_quantile(steps_ok, 0.9);
        }
        result.rows.push_back(row);
    }

    if (slope_ks.empty()) {
        for (const ScalingRow& row : result.rows)
            if (row.median_steps > 0.0) slope_ks.push_back(row.k);
    }
    std::vector<std::pair<double, double>> points;
    for (const ScalingRow& row : result.rows) {
        if (row.median_steps <= 0.0) continue;
        if (std::find(slope_ks.begin(), slope_ks.end(), row.k) == slope_ks.end()) continue;
        points.emplace_back(static_cast<double>(row.k), row.median_steps);
    }
    result.slope_ks = std::move(slope_ks);
    if (points.size() >= 2) result.slope = loglog_slope(points);
    return result;
}

CollapseResult collapse_suite(std::uint64_t n, std::uint64_t k, std::uint64_t trials, std::uint64_t master_seed) {
    if (trials < 1) throw std::invalid_argument("collapse_suite: trials must be >= 1");
    InitSpec spec;
    spec.kind = InitSpec::Kind::BalancedDecided;
    spec.n = n;
    spec.k = k;
    const OpinionCounts init = make_init(spec);
    const QuantitySnapshot snap0 = snapshot(init);

    CollapseResult result;
    result.n = n;
    result.k = k;
    result.trials = trials;
    result.gamma0 = snap0.gamma;
    result.surviving_bound = static_cast<double>(n) * snap0.gamma * std::log(static_cast<double>(n));
    result.p_bot = p_bot_exact(init);

    KahanSum sum_beta, sum_beta2;
    std::uint64_t within = 0, allbot = 0;
    std::vector<std::size_t> alive;
    std::vector<std::uint64_t> scratch(init.k(), 0);
    OpinionCounts state = init;
    const auto alive0 = alive_classes(init);
    for (std::uint64_t t = 0; t < trials; ++t) {
        Rng rng(master_seed, t);
        state = init;
        alive = alive0;
        gossip_step_inplace(state, alive, scratch, rng);
        const double beta1 = static_cast<double>(state.decided_total()) / static_cast<double>(n);
        sum_beta.add(beta1);
        sum_beta2.add(beta1 * beta1);
        if (static_cast<double>(alive.size()) <= result.surviving_bound) ++within;
        if (state.undecided == n) ++allbot;
    }
    const double td = static_cast<double>(trials);
    result.mean_beta1 = sum_beta.value() / td;
    const double var = std::fmax(0.0, sum_beta2.value() / td - result.mean_beta1 * result.mean_beta1);
    result.stderr_beta1 = std::sqrt(var / td);
    result.frac_surviving_within = static_cast<double>(within) / td;
    result.allbot_rate = static_cast<double>(allbot) / td;
    return result;
}

std::vector<OpinionCounts> sample_states(const StateSamplerSpec& spec, const HypothesisParams& params,
                                         std::uint64_t seed) {
    std::vector<OpinionCounts> states;
    states.reserve(spec.count);
    const auto n_constrained = static_cast<std::uint64_t>(
        std::llround(static_cast<double>(spec.count) * spec.hypothesis_fraction));

    for (std::uint64_t s = 0; s < spec.count; ++s) {
        Rng rng(seed, s);
        const bool constrained = s < n_constrained && spec.n_max >= params.n_min;
        if (!constrained) {
            // Log-uniform n, uniform k, uniform undecided share, uniform
            // random composition of the decided mass (zero counts allowed).
            const double u = rng.next_double();
            const double ln_lo = std::log(static_cast<double>(spec.n_min));
            const double ln_hi = std::log(static_cast<double>(spec.n_max));
            const auto n = static_cast<std::uint64_t>(std::llround(std::exp(ln_lo + u * (ln_hi - ln_lo))));
            const std::uint64_t k_hi = std::max(spec.k_min, std::min(spec.k_max, n));
            const std::uint64_t k = spec.k_min + rng.below(k_hi - spec.k_min + 1);
            const std::uint64_t undecided = rng.below(n + 1);
            const std::uint64_t dec = n - undecided;
            std::vector<std::uint64_t> cuts(k - 1);
            for (auto& c : cuts) c = rng.below(dec + 1);
            std::sort(cuts.begin(), cuts.end());
            std::vector<std::uint64_t> counts(k);
            std::uint64_t prev = 0;
            for (std::uint64_t i = 0; i + 1 < k; ++i) {
                counts[i] = cuts[i] - prev;
                prev = cuts[i];
            }
            counts[k - 1] = dec - prev;
            states.emplace_back(std::move(counts), undecided);
            continue;
        }
        // Constrained: n >= n_min gate (within the requested range), beta in
        // a band where all drift hypotheses hold, near-balanced counts so
        // gamma stays below its gate.
        const std::uint64_t n_lo = std::max(spec.n_min, params.n_min);
        for (;;) {
            const std::uint64_t n = n_lo + rng.below(spec.n_max - n_lo + 1);
            const double beta = 0.49 + 0.015 * rng.next_double();
            const auto dec = static_cast<std::uint64_t>(std::llround(beta * static_cast<double>(n)));
            const std::uint64_t k_lo = std::max<std::uint64_t>(
                spec.k_min, static_cast<std::uint64_t>(std::ceil(beta * beta / (0.9 * params.gamma_max))));
            if (k_lo > spec.k_max || dec < k_lo) continue;
            const std::uint64_t k = k_lo + rng.below(spec.k_max - k_lo + 1);
            std::vector<std::uint64_t> counts(k, dec / k);
            for (std::uint64_t i = 0; i < dec % k; ++i) ++counts[i];
            // Mild imbalance that keeps the gamma gate satisfied.
            const std::uint64_t moves = rng.below(dec / (4 * k) + 1);
            for (std::uint64_t mv = 0; mv < moves; ++mv) {
                const std::uint64_t from = rng.below(k), to = rng.below(k);
                if (counts[from] > 1) {
                    --counts[from];
                    ++counts[to];
                }
            }
            OpinionCounts state(std::move(counts), n - dec);
            const QuantitySnapshot snap = snapshot(state);
            if (snap.beta >= params.beta_min && snap.psi <= params.psi_max && snap.gamma <= params.gamma_max) {
                states.push_back(std::move(state));
                break;
            }
        }
    }
    return states;
}

namespace {

double lhs_from_oracle(const oracle::OracleMoments& om, BoundLhs kind, const QuantitySnapshot& snap) {
    switch (kind) {
        case BoundLhs::MeanGamma: return om.mean_gamma;
        case BoundLhs::MeanGammaTimesBeta2: return snap.beta * snap.beta * om.mean_gamma;
        case BoundLhs::MeanPsi: return om.mean_psi;
        case BoundLhs::MeanTnpm: return om.mean_alpha_max_tilde;
        case BoundLhs::MeanTnpt: return om.mean_gamma_tilde;
        case BoundLhs::VarBeta: return om.var_beta;
        case BoundLhs::VarGamma: return om.var_gamma;
    }
    return 0.0;
}

// Worst absolute deviation over a vector-valued equality; reports the pair
// (oracle value, analytic value) at the worst index.
void worst_pair(const std::vector<double>& lhs, const std::vector<double>& rhs, double& wl, double& wr) {
    wl = 0.0;
    wr = 0.0;
    double worst = -1.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double d = std::fabs(lhs[i] - rhs[i]);
        if (d > worst) {
            worst = d;
            wl = lhs[i];
            wr = rhs[i];
        }
    }
}

}  // namespace

std::vector<CheckRow> drift_suite(Model model, const std::vector<OpinionCounts>& states,
                                  const HypothesisParams& params, const DriftOptions& options,
                                  std::uint64_t master_seed) {
    std::vector<CheckRow> out;
    for (std::size_t sid = 0; sid < states.size(); ++sid) {
        const OpinionCounts& state = states[sid];
        const QuantitySnapshot snap = snapshot(state);
        const std::string id = std::to_string(sid);

        std::vector<PairSpec> pairs;
        if (state.k() >= 2) {
            pairs.push_back({1, 2, 0.0});
            pairs.push_back({2, 1, 0.5});
        }
        const MomentReport mr = model == Model::Gossip ? exact_moments_gossip(state, pairs)
                                                       : exact_moments_pp(state, pairs);
        const BoundReport br = bound_report(model, state, params);

        auto add_eq = [&](const std::string& name, double lhs, double rhs, double tol) {
            out.push_back({name, model, state.n(), id, lhs, rhs, "eq", tol, true, close_rel(lhs, rhs, tol)});
        };

        const bool exact_path = model == Model::PP || state.n() <= 8;
        if (exact_path) {
            const oracle::OneStepDistribution dist = model == Model::Gossip
                                                         ? oracle::gossip_onestep_exhaustive(state)
                                                         : oracle::pp_onestep_exact(state);
            const oracle::OracleMoments om = oracle::moments_of(dist, pairs);

            double wl = 0.0, wr = 0.0;
            worst_pair(om.mean_alpha, mr.mean_alpha, wl, wr);
            add_eq("exp_alpha", wl, wr, options.rel_tol);
            worst_pair(om.var_alpha, mr.var_alpha, wl, wr);
            add_eq("var_alpha", wl, wr, options.rel_tol);
            worst_pair(om.cov_alpha_beta, mr.cov_alpha_beta, wl, wr);
            add_eq("cov_alpha_beta", wl, wr, options.rel_tol);
            add_eq("exp_beta", om.mean_beta, mr.mean_beta, options.rel_tol);
            if (!mr.var_beta_is_bound) add_eq("var_beta", om.var_beta, mr.var_beta, options.rel_tol);
            if (mr.has_mean_gamma) add_eq("exp_gamma", om.mean_gamma, mr.mean_gamma, options.rel_tol);
            if (!pairs.empty()) {
                worst_pair(om.mean_delta, mr.mean_delta, wl, wr);
                add_eq("exp_delta", wl, wr, options.rel_tol);
                worst_pair(om.cov_alpha_ij, mr.cov_alpha_ij, wl, wr);
                add_eq("cov_alpha_pair", wl, wr, options.rel_tol);
            }

            for (const BoundEntry& e : br.entries) {
                const double lhs = lhs_from_oracle(om, e.lhs, snap);
                const double slack = 1e-12 * std::fmax(1.0, std::fmax(std::fabs(lhs), std::fabs(e.rhs)));
                const bool holds = e.relation == Relation::LE ? lhs <= e.rhs + slack : lhs >= e.rhs - slack;
                out.push_back({e.name, model, state.n(), id, lhs, e.rhs, e.relation == Relation::LE ? "le" : "ge",
                               slack, e.hypothesis_ok, !e.hypothesis_ok || holds});
            }
        } else {
            Rng rng(master_seed, 0x5D51F + sid);
            const oracle::EmpiricalMoments em =
                oracle::mc_onestep_moments(model, state, options.mc_samples, rng);

            auto add_stat_eq = [&](const std::string& name, double emp, double se, double analytic) {
                const double tol = options.sigmas * se;
                out.push_back({name, model, state.n(), id, emp, analytic, "eq", tol, true,
                               std::fabs(emp - analytic) <= tol + 1e-14});
            };
            double worst = -1.0;
            std::size_t wi = 0;
            for (std::size_t i = 0; i < em.mean_alpha.size(); ++i) {
                const double d = std::fabs(em.mean_alpha[i] - mr.mean_alpha[i]) / (em.stderr_alpha[i] + 1e-300);
                if (d > worst) {
                    worst = d;
                    wi = i;
                }
            }
            if (!em.mean_alpha.empty())
                add_stat_eq("exp_alpha_mc", em.mean_alpha[wi], em.stderr_alpha[wi], mr.mean_alpha[wi]);
            add_stat_eq("exp_beta_mc", em.mean_beta, em.stderr_beta, mr.mean_beta);

            for (const BoundEntry& e : br.entries) {
                double emp = 0.0, se = 0.0;
                switch (e.lhs) {
                    case BoundLhs::MeanGamma: emp = em.mean_gamma; se = em.stderr_gamma; break;
                    case BoundLhs::MeanGammaTimesBeta2:
                        emp = snap.beta * snap.beta * em.mean_gamma;
                        se = snap.beta * snap.beta * em.stderr_gamma;
                        break;
                    case BoundLhs::MeanPsi: emp = em.mean_psi; se = em.stderr_psi; break;
                    case BoundLhs::MeanTnpm: emp = em.mean_alpha_max_tilde; se = em.stderr_alpha_max_tilde; break;
                    case BoundLhs::MeanTnpt: emp = em.mean_gamma_tilde; se = em.stderr_gamma_tilde; break;
                    default: continue;  // variance bounds are checked on the exact paths only
                }
                const double band = options.sigmas * se;
                const bool holds = e.relation == Relation::LE ? emp <= e.rhs + band : emp >= e.rhs - band;
                out.push_back({e.name + "_mc", model, state.n(), id, emp, e.rhs,
                               e.relation == Relation::LE ? "le" : "ge", band, e.hypothesis_ok,
                               !e.hypothesis_ok || holds});
            }
        }
    }
    return out;
}

}  // namespace usd::experiments
