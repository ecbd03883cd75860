#include "usd/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace usd::io {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

json hypothesis_to_json(const HypothesisParams& h) {
    return json{{"beta_min", h.beta_min}, {"psi_max", h.psi_max}, {"gamma_max", h.gamma_max}, {"n_min", h.n_min}};
}

HypothesisParams hypothesis_from_json(const json& j) {
    HypothesisParams h;
    h.beta_min = j.at("beta_min").get<double>();
    h.psi_max = j.at("psi_max").get<double>();
    h.gamma_max = j.at("gamma_max").get<double>();
    h.n_min = j.at("n_min").get<std::uint64_t>();
    return h;
}

}  // namespace

json config_to_json(const RunConfig& c) {
    return json{{"subcommand", c.subcommand},
                {"model", model_name(c.model)},
                {"n", c.n},
                {"k", c.k},
                {"k_list", c.k_list},
                {"init", c.init_kind},
                {"counts", c.counts},
                {"undecided", c.undecided},
                {"lb_c", c.lb_c},
                {"trials", c.trials},
                {"seed", c.seed},
                {"max_steps", c.max_steps},
                {"record_every", c.record_every},
                {"out", c.out},
                {"format", c.format},
                {"precision", c.precision},
                {"hypothesis", hypothesis_to_json(c.hypothesis)},
                {"states", c.states},
                {"samples", c.samples}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.subcommand = j.at("subcommand").get<std::string>();
    c.model = j.at("model").get<std::string>() == "pp" ? Model::PP : Model::Gossip;
    c.n = j.at("n").get<std::uint64_t>();
    c.k = j.at("k").get<std::uint64_t>();
    c.k_list = j.at("k_list").get<std::vector<std::uint64_t>>();
    c.init_kind = j.at("init").get<std::string>();
    c.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    c.undecided = j.at("undecided").get<std::uint64_t>();
    c.lb_c = j.at("lb_c").get<double>();
    c.trials = j.at("trials").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.max_steps = j.at("max_steps").get<std::uint64_t>();
    c.record_every = j.at("record_every").get<std::uint64_t>();
    c.out = j.at("out").get<std::string>();
    c.format = j.at("format").get<std::string>();
    c.precision = j.at("precision").get<std::string>();
    c.hypothesis = hypothesis_from_json(j.at("hypothesis"));
    c.states = j.at("states").get<std::uint64_t>();
    c.samples = j.at("samples").get<std::uint64_t>();
    return c;
}

OpinionCounts state_from_json(const json& j) {
    const auto counts = j.at("counts").get<std::vector<std::uint64_t>>();
    const auto undecided = j.at("undecided").get<std::uint64_t>();
    OpinionCounts state(counts, undecided);
    if (j.contains("n") && j.at("n").get<std::uint64_t>() != state.n())
        throw std::invalid_argument("state json: counts and undecided do not sum to n");
    if (j.contains("k") && j.at("k").get<std::uint64_t>() != state.k())
        throw std::invalid_argument("state json: k does not match counts length");
    return state;
}

json state_to_json(const OpinionCounts& state) {
    return json{{"n", state.n()}, {"k", state.k()}, {"counts", state.counts}, {"undecided", state.undecided}};
}

std::string provenance_header(const RunConfig& config) {
    std::ostringstream os;
    os << "# version " << kVersion << "\n";
    os << "# seed " << config.seed << "\n";
    os << "# config " << config_to_json(config).dump() << "\n";
    return os.str();
}

std::string summary_csv(const RunConfig& config, const std::vector<experiments::TrialRecord>& records) {
    std::ostringstream os;
    os << provenance_header(config);
    os << "trial,outcome,winner,steps\n";
    for (const auto& r : records)
        os << r.trial << ',' << trial_outcome_name(r.outcome) << ',' << r.winner << ',' << r.steps << "\n";
    return os.str();
}

std::string trajectory_csv(const RunConfig& config, const std::vector<experiments::TrajectoryRow>& rows) {
    std::ostringstream os;
    os << provenance_header(config);
    os << "trial,step,beta,gamma,psi,gamma_tilde,alpha_max,alpha_max_tilde,argmax,alive,md,events\n";
    for (const auto& r : rows) {
        os << r.trial << ',' << r.step << ',' << format_double(r.snap.beta) << ',' << format_double(r.snap.gamma)
           << ',' << format_double(r.snap.psi) << ',' << format_double(r.snap.gamma_tilde) << ','
           << format_double(r.snap.alpha_max) << ',' << format_double(r.snap.alpha_max_tilde) << ','
           << r.snap.argmax << ',' << r.snap.alive << ',' << format_double(r.snap.md) << ',' << r.events << "\n";
    }
    return os.str();
}

std::string scaling_csv(const RunConfig& config, const experiments::ScalingResult& result) {
    std::ostringstream os;
    os << provenance_header(config);
    os << "# slope " << format_double(result.slope) << "\n";
    os << "k,trials,success_rate,median_steps,q10,q90\n";
    for (const auto& r : result.rows) {
        os << r.k << ',' << r.trials << ',' << format_double(r.success_rate) << ','
           << format_double(r.median_steps) << ',' << format_double(r.q10) << ',' << format_double(r.q90) << "\n";
    }
    return os.str();
}

std::string verify_csv(const RunConfig& config, const std::vector<experiments::CheckRow>& rows) {
    std::ostringstream os;
    os << provenance_header(config);
    os << "check_name,model,n,k_or_state_id,lhs,rhs,relation,tolerance,pass\n";
    for (const auto& r : rows) {
        os << r.name << ',' << model_name(r.model) << ',' << r.n << ',' << r.id << ',' << format_double(r.lhs)
           << ',' << format_double(r.rhs) << ',' << r.relation << ',' << format_double(r.tolerance) << ','
           << (r.pass ? "true" : "false") << "\n";
    }
    return os.str();
}

namespace {

json provenance_json(const RunConfig& config) {
    return json{{"version", kVersion}, {"seed", config.seed}, {"config", config_to_json(config)}};
}

}  // namespace

json summary_json(const RunConfig& config, const std::vector<experiments::TrialRecord>& records) {
    json arr = json::array();
    for (const auto& r : records)
        arr.push_back({{"trial", r.trial},
                       {"outcome", trial_outcome_name(r.outcome)},
                       {"winner", r.winner},
                       {"steps", r.steps}});
    return json{{"provenance", provenance_json(config)}, {"records", arr}};
}

json trajectory_json(const RunConfig& config, const std::vector<experiments::TrajectoryRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"trial", r.trial},
                       {"step", r.step},
                       {"beta", r.snap.beta},
                       {"gamma", r.snap.gamma},
                       {"psi", r.snap.psi},
                       {"gamma_tilde", r.snap.gamma_tilde},
                       {"alpha_max", r.snap.alpha_max},
                       {"alpha_max_tilde", r.snap.alpha_max_tilde},
                       {"argmax", r.snap.argmax},
                       {"alive", r.snap.alive},
                       {"md", r.snap.md},
                       {"events", r.events}});
    return json{{"provenance", provenance_json(config)}, {"rows", arr}};
}

json scaling_json(const RunConfig& config, const experiments::ScalingResult& result) {
    json arr = json::array();
    for (const auto& r : result.rows)
        arr.push_back({{"k", r.k},
                       {"trials", r.trials},
                       {"success_rate", r.success_rate},
                       {"median_steps", r.median_steps},
                       {"q10", r.q10},
                       {"q90", r.q90}});
    return json{{"provenance", provenance_json(config)},
                {"rows", arr},
                {"slope", result.slope},
                {"slope_ks", result.slope_ks}};
}

json verify_json(const RunConfig& config, const std::vector<experiments::CheckRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"check_name", r.name},
                       {"model", model_name(r.model)},
                       {"n", r.n},
                       {"k_or_state_id", r.id},
                       {"lhs", r.lhs},
                       {"rhs", r.rhs},
                       {"relation", r.relation},
                       {"tolerance", r.tolerance},
                       {"pass", r.pass}});
    return json{{"provenance", provenance_json(config)}, {"checks", arr}};
}

json collapse_json(const RunConfig& config, const experiments::CollapseResult& r) {
    return json{{"provenance", provenance_json(config)},
                {"n", r.n},
                {"k", r.k},
                {"trials", r.trials},
                {"gamma0", r.gamma0},
                {"mean_beta1", r.mean_beta1},
                {"stderr_beta1", r.stderr_beta1},
                {"surviving_bound", r.surviving_bound},
                {"frac_surviving_within", r.frac_surviving_within},
                {"allbot_rate", r.allbot_rate},
                {"p_bot", r.p_bot}};
}

json absorption_json(const RunConfig& config, const oracle::AbsorptionSolution& s) {
    json winners = json::array();
    for (const auto& [opinion, prob] : s.winner_probabilities)
        winners.push_back({{"opinion", opinion}, {"probability", prob}});
    return json{{"provenance", provenance_json(config)},
                {"failure_probability", s.failure_probability},
                {"success_probability", s.success_probability},
                {"winner_probabilities", winners},
                {"expected_steps", s.expected_steps},
                {"num_states", s.num_states}};
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << contents;
}

}  // namespace usd::io
