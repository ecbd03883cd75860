// Init generators, batch driver determinism, order statistics, and the
// collapse / drift suites at desk scale.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "usd/experiments.hpp"
#include "usd/oracle.hpp"

using namespace usd;
using namespace usd::experiments;

TEST_CASE("make_init balanced kinds") {
    InitSpec spec;
    spec.kind = InitSpec::Kind::BalancedHalf;
    spec.n = 8;
    spec.k = 2;
    const OpinionCounts half = make_init(spec);
    CHECK(half.counts == std::vector<std::uint64_t>{2, 2});
    CHECK(half.undecided == 4);

    spec.kind = InitSpec::Kind::BalancedDecided;
    spec.n = 4;
    spec.k = 4;
    const OpinionCounts dec = make_init(spec);
    CHECK(dec.counts == std::vector<std::uint64_t>{1, 1, 1, 1});
    CHECK(dec.undecided == 0);

    spec.n = 10;
    spec.k = 3;
    const OpinionCounts uneven = make_init(spec);
    CHECK(uneven.counts == std::vector<std::uint64_t>{4, 3, 3});
}

TEST_CASE("make_init lower bound") {
    InitSpec spec;
    spec.kind = InitSpec::Kind::LowerBound;
    spec.n = 10000;
    spec.k = 4;
    spec.c = 0.1;
    const OpinionCounts lb = make_init(spec);
    CHECK(lb.counts == std::vector<std::uint64_t>{1250, 1250, 1250, 1250});
    CHECK(lb.undecided == 5000);

    // k > k_star branch: every opinion supported, beta close to 1/2.
    spec.n = 16384;
    spec.c = 0.1;
    spec.k = 2000;  // k_star(16384, 0.1) = 264
    const OpinionCounts tail = make_init(spec);
    const std::uint64_t k_star = lower_bound_k_star(spec.n, spec.c);
    CHECK(k_star == 264);
    for (std::uint64_t i = 0; i < spec.k; ++i) CHECK(tail.counts[i] >= 1);
    for (std::uint64_t i = k_star; i < spec.k; ++i) CHECK(tail.counts[i] == 1);
    const double beta0 = tail.beta();
    CHECK(beta0 > 0.4);
    CHECK(beta0 <= 0.5);
}

TEST_CASE("make_init rejects infeasible parameters") {
    InitSpec spec;
    spec.kind = InitSpec::Kind::BalancedDecided;
    spec.n = 3;
    spec.k = 5;
    CHECK_THROWS_AS(make_init(spec), std::invalid_argument);
    spec.kind = InitSpec::Kind::LowerBound;
    spec.n = 100;
    spec.k = 60;  // > (1/2 - c) n
    CHECK_THROWS_AS(make_init(spec), std::invalid_argument);
    spec.kind = InitSpec::Kind::Explicit;
    spec.n = 5;
    spec.counts = {2, 2};
    spec.undecided = 2;  // sums to 6, not 5
    CHECK_THROWS_AS(make_init(spec), std::invalid_argument);
}

TEST_CASE("run_batch is deterministic and thread-count invariant") {
    InitSpec spec;
    spec.kind = InitSpec::Kind::Explicit;
    spec.n = 12;
    spec.counts = {4, 4};
    spec.undecided = 4;

    const auto a = run_batch(Model::Gossip, spec, 50, 2024, 0, 1, 1);
    const auto b = run_batch(Model::Gossip, spec, 50, 2024, 0, 1, 4);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].trial == b.records[i].trial);
        CHECK(a.records[i].outcome == b.records[i].outcome);
        CHECK(a.records[i].winner == b.records[i].winner);
        CHECK(a.records[i].steps == b.records[i].steps);
    }
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].trial == b.rows[i].trial);
        CHECK(a.rows[i].step == b.rows[i].step);
        CHECK(a.rows[i].snap.beta == b.rows[i].snap.beta);
        CHECK(a.rows[i].events == b.rows[i].events);
    }
}

TEST_CASE("recording does not perturb the trajectory") {
    InitSpec spec;
    spec.kind = InitSpec::Kind::Explicit;
    spec.n = 20;
    spec.counts = {7, 6};
    spec.undecided = 7;
    const auto plain = run_batch(Model::PP, spec, 20, 7, 0, 0, 1);
    const auto recorded = run_batch(Model::PP, spec, 20, 7, 0, 5, 1);
    for (std::size_t i = 0; i < plain.records.size(); ++i) {
        CHECK(plain.records[i].steps == recorded.records[i].steps);
        CHECK(plain.records[i].outcome == recorded.records[i].outcome);
        CHECK(plain.records[i].winner == recorded.records[i].winner);
    }
    CHECK(plain.rows.empty());
    CHECK(!recorded.rows.empty());

    // Steps strictly increase within each trial and start at 0.
    std::uint64_t trial = ~0ull;
    std::uint64_t last = 0;
    for (const auto& row : recorded.rows) {
        if (row.trial != trial) {
            trial = row.trial;
            CHECK(row.step == 0);
        } else {
            CHECK(row.step > last);
        }
        last = row.step;
    }
}

TEST_CASE("gossip failure fraction at n=2 approaches 1/3") {
    InitSpec spec;
    spec.kind = InitSpec::Kind::Explicit;
    spec.n = 2;
    spec.counts = {1, 1};
    spec.undecided = 0;
    const auto batch = run_batch(Model::Gossip, spec, 20000, 99, 0, 0, 1);
    std::uint64_t failures = 0;
    for (const auto& r : batch.records)
        if (r.outcome == TrialOutcome::Failure) ++failures;
    const double rate = static_cast<double>(failures) / 20000.0;
    const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / 20000.0);
    CHECK(std::fabs(rate - 1.0 / 3.0) < 4.0 * se);
}

TEST_CASE("order statistics use the lower convention") {
    CHECK(lower_median({5.0, 1.0, 3.0}) == 3.0);
    CHECK(lower_median({4.0, 1.0, 3.0, 2.0}) == 2.0);  // lower of the two middle values
    CHECK(lower_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.1) == 1.0);
    CHECK(lower_quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9) == 9.0);
    CHECK(lower_quantile({7.0}, 0.5) == 7.0);
    CHECK_THROWS_AS(lower_median({}), std::invalid_argument);
}

TEST_CASE("loglog slope recovers exponents") {
    std::vector<std::pair<double, double>> pts;
    for (const double k : {2.0, 4.0, 8.0, 16.0}) pts.emplace_back(k, 3.0 * k);
    CHECK(loglog_slope(pts) == doctest::Approx(1.0).epsilon(1e-12));
    pts.clear();
    for (const double k : {2.0, 4.0, 8.0, 16.0}) pts.emplace_back(k, 5.0 * std::sqrt(k));
    CHECK(loglog_slope(pts) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("scaling_suite on consensus starts reports zero medians") {
    // BalancedDecided with k = 1 is already consensus: median 0 for every k.
    const auto result = scaling_suite(Model::Gossip, 64, {1}, InitSpec::Kind::BalancedDecided, 10, 5, 0);
    CHECK(result.rows[0].success_rate == 1.0);
    CHECK(result.rows[0].median_steps == 0.0);
}

TEST_CASE("collapse_suite with k=1 keeps beta at 1") {
    const auto result = collapse_suite(256, 1, 200, 11);
    CHECK(result.mean_beta1 == 1.0);
    CHECK(result.allbot_rate == 0.0);
    CHECK(result.p_bot == 0.0);
    CHECK(result.gamma0 == 1.0);
}

TEST_CASE("collapse_suite mean beta1 tracks gamma0") {
    const auto result = collapse_suite(4096, 16, 400, 12);
    CHECK(result.gamma0 == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(std::fabs(result.mean_beta1 - result.gamma0) <= 4.0 * result.stderr_beta1);
    CHECK(result.p_bot <= 1e-30);  // e^{-n gamma0} is astronomically small here
}

TEST_CASE("sample_states respects bounds and hypothesis fraction") {
    StateSamplerSpec spec;
    spec.count = 40;
    spec.n_min = 2;
    spec.n_max = 50000;
    spec.k_max = 64;
    spec.hypothesis_fraction = 0.25;
    HypothesisParams params;
    const auto states = sample_states(spec, params, 7);
    REQUIRE(states.size() == 40);
    std::size_t hyp = 0;
    for (const auto& s : states) {
        CHECK(s.n() >= 2);
        CHECK(s.n() <= 50000);
        CHECK(s.k() >= 1);
        CHECK(s.k() <= 64);
        const auto snap = snapshot(s);
        if (s.n() >= params.n_min && snap.beta >= params.beta_min && snap.psi <= params.psi_max &&
            snap.gamma <= params.gamma_max)
            ++hyp;
    }
    CHECK(hyp >= 10);  // the constrained quarter
    // Determinism of the sampler.
    const auto again = sample_states(spec, params, 7);
    for (std::size_t i = 0; i < states.size(); ++i) CHECK(states[i] == again[i]);
}

TEST_CASE("drift_suite passes on pp states, exact path") {
    StateSamplerSpec spec;
    spec.count = 30;
    spec.n_max = 20000;
    HypothesisParams params;
    const auto states = sample_states(spec, params, 71);
    const auto rows = drift_suite(Model::PP, states, params, {}, 71);
    CHECK(!rows.empty());
    for (const auto& row : rows) CHECK(row.pass);
}

TEST_CASE("drift_suite passes on small gossip states, exhaustive path") {
    StateSamplerSpec spec;
    spec.count = 20;
    spec.n_min = 2;
    spec.n_max = 6;
    spec.k_max = 4;
    spec.hypothesis_fraction = 0.0;
    HypothesisParams params;
    const auto states = sample_states(spec, params, 73);
    const auto rows = drift_suite(Model::Gossip, states, params, {}, 73);
    CHECK(!rows.empty());
    for (const auto& row : rows) CHECK(row.pass);
}

TEST_CASE("drift_suite statistical path on a large gossip state") {
    StateSamplerSpec spec;
    spec.count = 3;
    spec.n_min = 5000;
    spec.n_max = 20000;
    spec.k_min = 4;
    spec.k_max = 16;
    spec.hypothesis_fraction = 0.0;
    HypothesisParams params;
    const auto states = sample_states(spec, params, 77);
    DriftOptions options;
    options.mc_samples = 20000;
    const auto rows = drift_suite(Model::Gossip, states, params, options, 77);
    CHECK(!rows.empty());
    for (const auto& row : rows) CHECK(row.pass);
}

TEST_CASE("scaling_suite is deterministic") {
    const auto a = scaling_suite(Model::PP, 32, {2, 4}, InitSpec::Kind::BalancedHalf, 30, 31337, 0, {2, 4}, 1);
    const auto b = scaling_suite(Model::PP, 32, {2, 4}, InitSpec::Kind::BalancedHalf, 30, 31337, 0, {2, 4}, 2);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].median_steps == b.rows[i].median_steps);
        CHECK(a.rows[i].q10 == b.rows[i].q10);
        CHECK(a.rows[i].q90 == b.rows[i].q90);
        CHECK(a.rows[i].success_rate == b.rows[i].success_rate);
    }
    CHECK(a.slope == b.slope);
}

TEST_CASE("drift_suite trivially passes on absorbing states") {
    const std::vector<OpinionCounts> states = {OpinionCounts({9, 0}, 0), OpinionCounts({0, 0}, 9)};
    for (const Model model : {Model::Gossip, Model::PP}) {
        const auto rows = drift_suite(model, states, {}, {}, 1);
        CHECK(!rows.empty());
        for (const auto& row : rows) CHECK(row.pass);
    }
}
