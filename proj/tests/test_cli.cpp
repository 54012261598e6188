#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "qhnn/cli.hpp"
#include "qhnn/experiments.hpp"
#include "qhnn/io.hpp"

using namespace qhnn;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "qhnn-cli-test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("example subcommand reports and exits cleanly") {
    const CliResult r = cli({"example", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("all checks passed") != std::string::npos);
    CHECK(r.out.find("E(x(0))") != std::string::npos);

    const fs::path json_path = temp_dir() / "example1.json";
    const CliResult rj = cli({"example", "1", "--json", json_path.string()});
    CHECK(rj.code == 0);
    const auto doc = nlohmann::json::parse(slurp(json_path));
    CHECK(doc.at("all_pass").get<bool>());
}

TEST_CASE("usage errors exit with code 2") {
    CHECK(cli({"example", "7"}).code == 2);
    CHECK(cli({"nonsense"}).code == 2);
    CHECK(cli({"run", "--model", "bogus", "--example-instance", "1"}).code == 2);
    CHECK(cli({"run", "--model", "mv", "--random", "3", "--seed", "1"}).code == 2);  // no K
    CHECK(cli({}).code == 2);
}

TEST_CASE("help exits zero") {
    const CliResult r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("Usage") != std::string::npos);
}

TEST_CASE("run writes trace and verdict files") {
    const fs::path dir = temp_dir();
    const fs::path trace = dir / "trace.csv";
    const fs::path verdict = dir / "verdict.json";

    const CliResult r = cli({"run", "--model", "cv", "--mode", "parallel",
                             "--example-instance", "1", "--t-max", "10", "--trace",
                             trace.string(), "--verdict", verdict.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("verdict: periodic") != std::string::npos);

    const std::string csv = slurp(trace);
    CHECK(csv.rfind("t_num,t_den,energy,neuron,changed\n", 0) == 0);
    CHECK(csv.find("\n0,1,-5,0,0\n") != std::string::npos);  // initial row, E = -5

    const auto doc = nlohmann::json::parse(slurp(verdict));
    CHECK(doc.at("verdict").get<std::string>() == "periodic");
    CHECK(doc.at("period").get<int>() == 2);
    CHECK(std::abs(doc.at("final_energy").get<double>() - -5.0) < 1e-9);
}

TEST_CASE("run outputs are byte-identical across invocations") {
    const fs::path dir = temp_dir();
    const fs::path a = dir / "a.csv";
    const fs::path b = dir / "b.csv";
    const std::vector<std::string> base = {"run",  "--model", "mv3",   "--mode",
                                           "async", "--random", "4",    "--seed",
                                           "9",     "--k",      "8",    "--t-max",
                                           "50"};
    auto with_trace = [&base](const fs::path& p) {
        std::vector<std::string> args = base;
        args.push_back("--trace");
        args.push_back(p.string());
        return args;
    };
    REQUIRE(cli(with_trace(a)).code == 0);
    REQUIRE(cli(with_trace(b)).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(!slurp(a).empty());
}

TEST_CASE("diagnose emits one JSON record per event") {
    const fs::path diag = temp_dir() / "diag.jsonl";
    const CliResult r = cli({"run", "--model", "mv", "--mode", "async",
                             "--example-instance", "1", "--t-max", "3", "--diagnose",
                             diag.string()});
    REQUIRE(r.code == 0);

    std::ifstream in(diag);
    std::string line;
    int records = 0;
    int with_shifts = 0;
    while (std::getline(in, line)) {
        const auto doc = nlohmann::json::parse(line);
        CHECK(doc.contains("neuron"));
        CHECK(doc.contains("delta_e"));
        if (doc.contains("a")) ++with_shifts;
        ++records;
    }
    CHECK(records == 18);  // 3 units x 3n events
    CHECK(with_shifts > 0);
}

TEST_CASE("validate accepts the example instance and rejects a broken file") {
    CHECK(cli({"validate", "--example-instance", "1"}).code == 0);

    Instance bad;
    bad.weights = WeightMatrix(2);
    bad.weights(0, 1) = Quaternion::unit_i();
    bad.weights(1, 0) = Quaternion::unit_i();
    bad.state = NetworkState::from_quaternions({Quaternion::one(), Quaternion::one()});
    const fs::path path = temp_dir() / "bad.json";
    save_instance(path.string(), bad);

    const CliResult r = cli({"validate", "--instance", path.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("VIOLATED") != std::string::npos);
    CHECK(r.out.find("entry (1,2)") != std::string::npos);

    CHECK(cli({"validate", "--instance", "/nonexistent/file.json"}).code == 2);
}

TEST_CASE("fixed-points enumerates the counterexample instance") {
    const CliResult r = cli({"fixed-points", "--example-instance", "1", "--model", "mv3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("fixed point(s)") != std::string::npos);

    // over budget: 4096^2 states
    const CliResult over = cli({"fixed-points", "--example-instance", "1", "--model", "mv3",
                                "--k", "16", "--budget", "1e6"});
    CHECK(over.code == 3);
}

TEST_CASE("sweep writes the results CSV") {
    const fs::path out = temp_dir() / "sweep.csv";
    const CliResult r = cli({"sweep", "--n", "3", "--trials", "2", "--t-max", "20",
                             "--k-exponents", "1", "--k-exponents", "3", "--seed", "5",
                             "--out", out.string()});
    REQUIRE(r.code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.rfind("model,mode,K1,K2,K3,", 0) == 0);
    CHECK(csv.find("mv3,parallel,8,8,8,2,") != std::string::npos);
}
