// End-to-end CLI checks: exit codes, reproducibility of the verify
// subcommand, and the failure path when hypothesis gates are loosened past
// where the drift inequalities hold. argv[1] is the usd_cli path.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::printf("FAILED: %s\n", what.c_str());
    }
}

int run(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::printf("usage: test_cli <usd_cli path>\n");
        return 1;
    }
    const std::string cli = argv[1];
    const std::string quiet = " >/dev/null 2>/dev/null";

    expect(run(cli + " exact --model gossip --n 2 --k 2 --init explicit:1,1" + quiet) == 0, "exact exits 0");
    expect(run(cli + " pbot --n 16 --k 16 --init balanced-decided" + quiet) == 0, "pbot exits 0");

    // Usage errors exit 2.
    expect(run(cli + " frobnicate" + quiet) == 2, "unknown subcommand exits 2");
    expect(run(cli + " simulate --model carrier-pigeon" + quiet) == 2, "bad model exits 2");
    expect(run(cli + " simulate --model pp --init explicit:1,1" + quiet) == 2, "explicit init without --n exits 2");

    // verify is reproducible and exits 0 when all checks pass.
    const std::string ver = " verify --model pp --n 500 --states 20 --seed 7 --out cli_ver.csv";
    expect(run(cli + ver + quiet) == 0, "verify exits 0 on success");
    const std::string first = slurp("cli_ver.csv");
    expect(run(cli + ver + quiet) == 0, "verify rerun exits 0");
    expect(!first.empty() && first == slurp("cli_ver.csv"), "verify output is byte-identical across reruns");
    expect(first.find("check_name,model,n,k_or_state_id,lhs,rhs,relation,tolerance,pass") != std::string::npos,
           "verify csv has the fixed header");

    // Deliberately loosened hypothesis gates admit states where the
    // normalized-max drift bound is false, so verify must exit 1.
    const int loose = run(cli +
                          " verify --model pp --n 50 --states 40 --seed 3 --n-min 2 --beta-min 0.0 "
                          "--gamma-max 1.0 --psi-max 1.0 --out cli_ver_loose.csv" +
                          quiet);
    expect(loose == 1, "verify exits 1 when a gated bound fails");
    expect(slurp("cli_ver_loose.csv").find("false") != std::string::npos, "failing rows are recorded");

    // file: init and JSON output format round out the surface.
    {
        std::ofstream init("cli_init.json");
        init << "{\"n\":6,\"k\":2,\"counts\":[2,1],\"undecided\":3}";
    }
    expect(run(cli + " simulate --model pp --init file:cli_init.json --trials 5 --seed 2 --format json "
                     "--out cli_sim.json" + quiet) == 0,
           "file init with json format exits 0");
    const std::string sim_json = slurp("cli_sim.json");
    expect(sim_json.find("\"records\"") != std::string::npos && sim_json.find("\"counts\"") != std::string::npos,
           "json output carries records and the config echo");
    expect(run(cli + " simulate --model pp --init file:cli_missing.json --trials 1" + quiet) == 2,
           "missing init file exits 2");

    if (failures == 0) std::printf("test_cli: all checks passed\n");
    return failures == 0 ? 0 : 1;
}
