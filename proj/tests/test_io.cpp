// Config round-trip, CSV schemas, and provenance headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <nlohmann/json.hpp>
#include <sstream>

#include "usd/io.hpp"

using namespace usd;
using namespace usd::io;

TEST_CASE("run config round-trips losslessly through json") {
    RunConfig c;
    c.subcommand = "simulate";
    c.model = Model::PP;
    c.n = 4096;
    c.k = 8;
    c.k_list = {2, 4, 8};
    c.init_kind = "explicit";
    c.counts = {3, 2, 1};
    c.undecided = 4090;
    c.lb_c = 0.1;
    c.trials = 500;
    c.seed = 123456789;
    c.max_steps = 77;
    c.record_every = 4096;
    c.out = "out.csv";
    c.format = "csv";
    c.precision = "rational";
    c.hypothesis.beta_min = 0.48;
    c.hypothesis.n_min = 5000;
    c.states = 99;
    c.samples = 12345;

    const nlohmann::json j = config_to_json(c);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(back.model == Model::PP);
    CHECK(back.counts == c.counts);
    CHECK(back.hypothesis.beta_min == c.hypothesis.beta_min);

    // And through a serialized string.
    const RunConfig reparsed = config_from_json(nlohmann::json::parse(j.dump()));
    CHECK(config_to_json(reparsed) == j);
}

TEST_CASE("state json round-trip and validation") {
    const OpinionCounts state({5, 0, 3}, 2);
    const nlohmann::json j = state_to_json(state);
    CHECK(j.at("n") == 10);
    CHECK(j.at("k") == 3);
    const OpinionCounts back = state_from_json(j);
    CHECK(back == state);

    nlohmann::json bad = j;
    bad["n"] = 11;
    CHECK_THROWS_AS(state_from_json(bad), std::invalid_argument);
}

TEST_CASE("csv schemas have the fixed column order") {
    RunConfig c;
    c.subcommand = "simulate";
    c.seed = 7;

    std::vector<experiments::TrialRecord> records(1);
    records[0] = {0, TrialOutcome::Consensus, 2, 14, 7, 0};
    const std::string summary = summary_csv(c, records);
    CHECK(summary.find("trial,outcome,winner,steps\n") != std::string::npos);
    CHECK(summary.find("0,consensus,2,14\n") != std::string::npos);
    CHECK(summary.find("# version usd-sim") != std::string::npos);
    CHECK(summary.find("# seed 7") != std::string::npos);
    CHECK(summary.find("# config {") != std::string::npos);

    std::vector<experiments::TrajectoryRow> rows(1);
    rows[0].trial = 0;
    rows[0].step = 3;
    rows[0].snap.beta = 0.5;
    rows[0].snap.argmax = 1;
    rows[0].snap.alive = 2;
    rows[0].events = "beta_plus;psi_minus";
    const std::string traj = trajectory_csv(c, rows);
    CHECK(traj.find("trial,step,beta,gamma,psi,gamma_tilde,alpha_max,alpha_max_tilde,argmax,alive,md,events\n") !=
          std::string::npos);
    CHECK(traj.find("0,3,0.5,0,0,0,0,0,1,2,0,beta_plus;psi_minus\n") != std::string::npos);

    experiments::ScalingResult scaling;
    scaling.rows.push_back({8, 100, 0.97, 41.0, 30.0, 60.0});
    const std::string sc = scaling_csv(c, scaling);
    CHECK(sc.find("k,trials,success_rate,median_steps,q10,q90\n") != std::string::npos);
    CHECK(sc.find("8,100,0.96999999999999997,41,30,60\n") != std::string::npos);

    std::vector<experiments::CheckRow> checks(1);
    checks[0] = {"exp_beta", Model::PP, 100, "12", 0.5, 0.5, "eq", 1e-9, true, true};
    const std::string ver = verify_csv(c, checks);
    CHECK(ver.find("check_name,model,n,k_or_state_id,lhs,rhs,relation,tolerance,pass\n") != std::string::npos);
    CHECK(ver.find("exp_beta,pp,100,12,0.5,0.5,eq,1.0000000000000001e-09,true\n") != std::string::npos);
}

TEST_CASE("doubles are serialized with 17 significant digits") {
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(2.0 / 3.0) == "0.66666666666666663");
}

TEST_CASE("identical configs produce identical output strings") {
    RunConfig c;
    c.subcommand = "scaling";
    c.seed = 99;
    experiments::ScalingResult result;
    result.rows.push_back({4, 10, 1.0, 12.0, 8.0, 20.0});
    result.slope = 0.875;
    CHECK(scaling_csv(c, result) == scaling_csv(c, result));
    CHECK(scaling_json(c, result).dump() == scaling_json(c, result).dump());
}
