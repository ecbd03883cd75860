// Machine-readable output: run configuration with lossless JSON round-trip,
// provenance headers, and the fixed CSV/JSON schemas. All floating-point
// values are serialized with 17 significant digits so identical runs emit
// byte-identical files.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "usd/analytic.hpp"
#include "usd/experiments.hpp"
#include "usd/oracle.hpp"
#include "usd/types.hpp"

namespace usd::io {

inline constexpr const char* kVersion = "usd-sim 1.0.0";

struct RunConfig {
    std::string subcommand;
    Model model = Model::Gossip;
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    std::vector<std::uint64_t> k_list;
    std::string init_kind = "balanced-decided";
    std::vector<std::uint64_t> counts;  // explicit init
    std::uint64_t undecided = 0;        // explicit init
    double lb_c = 0.1;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::uint64_t max_steps = 0;  // 0 = model default
    std::uint64_t record_every = 0;
    std::string out;
    std::string format = "csv";
    std::string precision = "double";
    HypothesisParams hypothesis;
    std::uint64_t states = 200;
    std::uint64_t samples = 100000;
};

std::string format_double(double v);  // %.17g

nlohmann::json config_to_json(const RunConfig& config);
RunConfig config_from_json(const nlohmann::json& j);

// Parses an explicit-init JSON file: {"n":int,"k":int,"counts":[...],"undecided":int}.
OpinionCounts state_from_json(const nlohmann::json& j);
nlohmann::json state_to_json(const OpinionCounts& state);

// "# version ...\n# seed ...\n# config {...}\n" comment block.
std::string provenance_header(const RunConfig& config);

std::string summary_csv(const RunConfig& config, const std::vector<experiments::TrialRecord>& records);
std::string trajectory_csv(const RunConfig& config, const std::vector<experiments::TrajectoryRow>& rows);
std::string scaling_csv(const RunConfig& config, const experiments::ScalingResult& result);
std::string verify_csv(const RunConfig& config, const std::vector<experiments::CheckRow>& rows);

nlohmann::json summary_json(const RunConfig& config, const std::vector<experiments::TrialRecord>& records);
nlohmann::json trajectory_json(const RunConfig& config, const std::vector<experiments::TrajectoryRow>& rows);
nlohmann::json scaling_json(const RunConfig& config, const experiments::ScalingResult& result);
nlohmann::json verify_json(const RunConfig& config, const std::vector<experiments::CheckRow>& rows);
nlohmann::json collapse_json(const RunConfig& config, const experiments::CollapseResult& result);
nlohmann::json absorption_json(const RunConfig& config, const oracle::AbsorptionSolution& solution);

void write_file(const std::string& path, const std::string& contents);

}  // namespace usd::io
