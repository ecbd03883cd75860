// Command-line front end: simulate / scaling / collapse / verify / exact /
// pbot. All configuration comes from flags or config files (no environment
// variables); identical flags and seed reproduce output files byte for byte
// regardless of --threads.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "usd/experiments.hpp"
#include "usd/io.hpp"
#include "usd/oracle.hpp"

namespace {

using usd::Model;
using usd::OpinionCounts;
using usd::io::RunConfig;
namespace experiments = usd::experiments;
namespace oracle = usd::oracle;

experiments::InitSpec parse_init(const RunConfig& config) {
    experiments::InitSpec spec;
    spec.n = config.n;
    spec.k = config.k;
    spec.c = config.lb_c;
    if (config.init_kind == "balanced-decided") {
        spec.kind = experiments::InitSpec::Kind::BalancedDecided;
    } else if (config.init_kind == "balanced-half") {
        spec.kind = experiments::InitSpec::Kind::BalancedHalf;
    } else if (config.init_kind == "lower-bound") {
        spec.kind = experiments::InitSpec::Kind::LowerBound;
    } else if (config.init_kind == "explicit") {
        spec.kind = experiments::InitSpec::Kind::Explicit;
        spec.counts = config.counts;
        spec.undecided = config.undecided;
    } else {
        throw CLI::ValidationError("--init", "unknown init kind: " + config.init_kind);
    }
    return spec;
}

// --init accepts balanced-decided | balanced-half | lower-bound |
// explicit:c1,c2,... (undecided = n - sum) | file:PATH (state JSON).
void resolve_init_string(RunConfig& config, const std::string& init) {
    if (init.rfind("explicit:", 0) == 0) {
        config.init_kind = "explicit";
        config.counts.clear();
        std::stringstream ss(init.substr(9));
        std::string tok;
        std::uint64_t sum = 0;
        while (std::getline(ss, tok, ',')) {
            config.counts.push_back(std::stoull(tok));
            sum += config.counts.back();
        }
        if (config.n == 0) throw CLI::ValidationError("--init", "explicit init requires --n");
        if (sum > config.n) throw CLI::ValidationError("--init", "explicit counts exceed n");
        config.undecided = config.n - sum;
        config.k = config.counts.size();
    } else if (init.rfind("file:", 0) == 0) {
        std::ifstream in(init.substr(5));
        if (!in) throw CLI::ValidationError("--init", "cannot open init file");
        nlohmann::json j;
        in >> j;
        const OpinionCounts state = usd::io::state_from_json(j);
        config.init_kind = "explicit";
        config.counts = state.counts;
        config.undecided = state.undecided;
        config.n = state.n();
        config.k = state.k();
    } else {
        config.init_kind = init;
    }
}

void emit(const RunConfig& config, const std::string& csv, const nlohmann::json& j) {
    const std::string payload = config.format == "json" ? j.dump(2) + "\n" : csv;
    if (config.out.empty()) {
        std::cout << payload;
    } else {
        usd::io::write_file(config.out, payload);
    }
}

std::ostream& human(const RunConfig& config) { return config.out.empty() ? std::cerr : std::cout; }

void emit_json(const RunConfig& config, const nlohmann::json& j) {
    const std::string payload = j.dump(2) + "\n";
    if (config.out.empty()) {
        std::cout << payload;
    } else {
        usd::io::write_file(config.out, payload);
    }
}

int cmd_simulate(RunConfig config, int threads) {
    const auto spec = parse_init(config);
    const auto batch = experiments::run_batch(config.model, spec, config.trials, config.seed, config.max_steps,
                                              config.record_every, threads);
    std::uint64_t consensus = 0, failure = 0;
    double step_sum = 0.0;
    for (const auto& r : batch.records) {
        if (r.outcome == usd::TrialOutcome::Consensus) {
            ++consensus;
            step_sum += static_cast<double>(r.steps);
        } else if (r.outcome == usd::TrialOutcome::Failure) {
            ++failure;
        }
    }
    std::ostream& os = human(config);
    os << "simulate: " << config.trials << " trials, " << consensus << " consensus, " << failure << " failure, "
       << (config.trials - consensus - failure) << " timeout";
    if (consensus > 0) os << ", mean steps to consensus " << step_sum / static_cast<double>(consensus);
    os << "\n";

    emit(config, usd::io::summary_csv(config, batch.records), usd::io::summary_json(config, batch.records));
    if (config.record_every > 0) {
        // Trajectory goes next to the summary (<out>.trajectory) or to stdout.
        const std::string payload = config.format == "json"
                                        ? usd::io::trajectory_json(config, batch.rows).dump(2) + "\n"
                                        : usd::io::trajectory_csv(config, batch.rows);
        if (config.out.empty()) {
            std::cout << payload;
        } else {
            usd::io::write_file(config.out + ".trajectory", payload);
        }
    }
    return 0;
}

int cmd_scaling(RunConfig config, int threads) {
    const auto kind = parse_init(config).kind;
    const auto result = experiments::scaling_suite(config.model, config.n, config.k_list, kind, config.trials,
                                                   config.seed, config.max_steps, {}, threads);
    human(config) << "scaling: slope " << result.slope << " over " << result.slope_ks.size() << " ks\n";
    emit(config, usd::io::scaling_csv(config, result), usd::io::scaling_json(config, result));
    return 0;
}

int cmd_collapse(RunConfig config) {
    const auto result = experiments::collapse_suite(config.n, config.k, config.trials, config.seed);
    human(config) << "collapse: mean beta1 " << result.mean_beta1 << " (gamma0 " << result.gamma0
                  << "), all-bot rate " << result.allbot_rate << " (exact " << result.p_bot << ")\n";
    emit_json(config, usd::io::collapse_json(config, result));
    return 0;
}

int cmd_verify(RunConfig config) {
    experiments::StateSamplerSpec sampler;
    sampler.count = config.states;
    if (config.n > 0) {
        sampler.n_min = config.n;
        sampler.n_max = config.n;
    }
    if (config.k > 0) sampler.k_max = config.k;
    const auto states = experiments::sample_states(sampler, config.hypothesis, config.seed);
    experiments::DriftOptions options;
    options.mc_samples = config.samples;
    auto rows = experiments::drift_suite(config.model, states, config.hypothesis, options, config.seed);

    // p-bot cross-checks against the exhaustive all-undecided mass on the
    // enumerable states.
    if (config.model == Model::Gossip) {
        for (std::size_t sid = 0; sid < states.size(); ++sid) {
            if (states[sid].n() > 7) continue;
            const double exact = usd::p_bot_exact(states[sid]);
            const auto dist = oracle::gossip_onestep_exhaustive(states[sid]);
            const auto om = oracle::moments_of(dist);
            rows.push_back({"p_bot", Model::Gossip, states[sid].n(), std::to_string(sid), om.mass_all_bot, exact,
                            "eq", 1e-12, true, std::fabs(om.mass_all_bot - exact) <= 1e-12});
        }
    }

    std::size_t failed = 0;
    for (const auto& r : rows)
        if (!r.pass) ++failed;
    human(config) << "verify: " << rows.size() << " checks, " << failed << " failed\n";
    emit(config, usd::io::verify_csv(config, rows), usd::io::verify_json(config, rows));
    return failed == 0 ? 0 : 1;
}

int cmd_exact(RunConfig config, std::uint64_t state_cap) {
    const OpinionCounts start = experiments::make_init(parse_init(config));
    const auto precision =
        config.precision == "rational" ? oracle::Precision::Rational : oracle::Precision::Double;
    const auto solution = oracle::exact_absorption(config.model, start, state_cap, precision);
    human(config) << "exact: failure " << solution.failure_probability << ", expected steps "
                  << solution.expected_steps << " (" << solution.num_states << " states)\n";
    emit_json(config, usd::io::absorption_json(config, solution));
    return 0;
}

int cmd_pbot(RunConfig config) {
    const OpinionCounts start = experiments::make_init(parse_init(config));
    const double p = usd::p_bot_exact(start);
    human(config) << "p_bot = " << usd::io::format_double(p) << "\n";
    nlohmann::json j{{"provenance", nlohmann::json{{"version", usd::io::kVersion},
                                                   {"seed", config.seed},
                                                   {"config", usd::io::config_to_json(config)}}},
                     {"p_bot", p}};
    emit_json(config, j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Undecided-state dynamics simulator and verification harness"};
    app.require_subcommand(1);

    RunConfig config;
    int threads = 1;
    std::string model_str = "gossip";
    std::string init_str = "balanced-decided";
    std::string record_str = "0";
    std::uint64_t state_cap = 20000;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--model", model_str, "gossip | pp")->check(CLI::IsMember({"gossip", "pp"}));
        cmd->add_option("--n", config.n, "number of vertices");
        cmd->add_option("--k", config.k, "number of decided opinions");
        cmd->add_option("--k-list", config.k_list, "k values (scaling)")->delimiter(',');
        cmd->add_option("--init", init_str,
                        "balanced-decided | balanced-half | lower-bound | explicit:c1,c2,... | file:PATH");
        cmd->add_option("--lb-c", config.lb_c, "lower-bound constant c in (0, 1/2)");
        cmd->add_option("--trials", config.trials, "number of trials");
        cmd->add_option("--seed", config.seed, "master seed");
        cmd->add_option("--max-steps", config.max_steps, "step cap (0 = model default)");
        cmd->add_option("--record-every", record_str,
                        "trajectory cadence in steps; 0 = off, auto = 1 for gossip / n for pp");
        cmd->add_option("--out", config.out, "output file (stdout if empty)");
        cmd->add_option("--format", config.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
        cmd->add_option("--threads", threads, "worker threads (output is thread-count invariant)");
        cmd->add_option("--exact-precision", config.precision, "double | rational")
            ->check(CLI::IsMember({"double", "rational"}));
        cmd->add_option("--states", config.states, "number of random states (verify)");
        cmd->add_option("--state-cap", state_cap, "count-state-space cap (exact)");
        cmd->add_option("--samples", config.samples, "Monte-Carlo samples per statistical check");
        cmd->add_option("--beta-min", config.hypothesis.beta_min, "drift hypothesis gate");
        cmd->add_option("--psi-max", config.hypothesis.psi_max, "drift hypothesis gate");
        cmd->add_option("--gamma-max", config.hypothesis.gamma_max, "drift hypothesis gate");
        cmd->add_option("--n-min", config.hypothesis.n_min, "drift hypothesis gate");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run seeded trials and emit summary/trajectory");
    CLI::App* scaling = app.add_subcommand("scaling", "consensus-time statistics over a k list");
    CLI::App* collapse = app.add_subcommand("collapse", "one-round collapse statistics from beta0 = 1");
    CLI::App* verify = app.add_subcommand("verify", "moment/bound verification against exact oracles");
    CLI::App* exact = app.add_subcommand("exact", "absorbing-chain solve on a small instance");
    CLI::App* pbot = app.add_subcommand("pbot", "exact first-round all-undecided probability");
    for (CLI::App* cmd : {simulate, scaling, collapse, verify, exact, pbot}) add_common(cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        config.model = model_str == "pp" ? Model::PP : Model::Gossip;
        resolve_init_string(config, init_str);
        if (record_str == "auto") {
            config.record_every = config.model == Model::Gossip ? 1 : config.n;
        } else {
            config.record_every = std::stoull(record_str);
        }
        if (config.trials == 0) config.trials = 1;

        if (simulate->parsed()) {
            config.subcommand = "simulate";
            return cmd_simulate(config, threads);
        }
        if (scaling->parsed()) {
            config.subcommand = "scaling";
            return cmd_scaling(config, threads);
        }
        if (collapse->parsed()) {
            config.subcommand = "collapse";
            return cmd_collapse(config);
        }
        if (verify->parsed()) {
            config.subcommand = "verify";
            return cmd_verify(config);
        }
        if (exact->parsed()) {
            config.subcommand = "exact";
            return cmd_exact(config, state_cap);
        }
        config.subcommand = "pbot";
        return cmd_pbot(config);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
