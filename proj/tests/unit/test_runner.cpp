#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ouselect/runner.hpp"

using namespace ouselect;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path("runner_scratch") / name;
    fs::remove_all(p);
    return p;
}

int run_quiet(const ExperimentConfig& c) {
    std::ostringstream log;
    return run(c, log);
}

} // namespace

TEST_CASE("config parsing") {
    const ExperimentConfig c = config_from_json(json::parse(R"({
        "command": "audit-oracle", "signal": "trigpoly", "n": [100, 200], "rho": 0.1,
        "noise": {"a": -0.5, "lambda": 2, "rho1": 1, "rho2": 0.5, "jump_law": "gaussian"},
        "seed": 18446744073709551615, "sigma": "known", "family": "box"})"));
    CHECK(c.command == "audit-oracle");
    CHECK(c.n_list == std::vector<int>{100, 200});
    CHECK(c.rho == "0.10000000000000001");
    CHECK(c.noise.jump_law == JumpLaw::gaussian);
    CHECK(c.seed == 18446744073709551615ULL);
    CHECK_NOTHROW(c.validate());
    // echo and re-parse are stable
    const json echo = config_to_json(c);
    CHECK(config_to_json(config_from_json(echo)) == echo);

    CHECK_THROWS_AS(config_from_json(json::parse(R"({"bogus": 1})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"n": "ten"})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json::parse(R"({"noise": {"a": 1}})")), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(json::parse("[1]")), std::invalid_argument);
}

TEST_CASE("validation maps to the config exit code") {
    ExperimentConfig c;
    c.out = scratch("bad").string();
    c.rho = "0.5";
    CHECK(run_quiet(c) == kExitConfig);
    c.rho = "auto";
    c.command = "explode";
    CHECK(run_quiet(c) == kExitConfig);
    c.command = "audit-oracle";
    c.replicates = 10;
    CHECK(run_quiet(c) == kExitConfig);
    c.replicates = 500;
    c.dt = 0.3;
    CHECK(run_quiet(c) == kExitConfig);
    c.dt = 1.0 / 64;
    c.n_list = {};
    CHECK(run_quiet(c) == kExitConfig);
    c.n_list = {100};
    c.signal = "nope";
    CHECK(run_quiet(c) == kExitConfig);
    c.signal = "expcos";
    c.command = "ingest";
    CHECK(run_quiet(c) == kExitConfig);  // no input
}

TEST_CASE("simulate is deterministic and the manifest is complete") {
    ExperimentConfig c;
    c.command = "simulate";
    c.signal = "zero";
    c.noise = NoiseParams{0.0, 0.0, 1.0, 0.0};
    c.n_list = {10};
    c.out = scratch("sim_a").string();
    REQUIRE(run_quiet(c) == kExitOk);
    const fs::path a = c.out;
    c.out = scratch("sim_b").string();
    REQUIRE(run_quiet(c) == kExitOk);
    const fs::path b = c.out;
    CHECK(slurp(a / "path.csv") == slurp(b / "path.csv"));
    CHECK(slurp(a / "manifest.json") != "");
    const json m = json::parse(slurp(a / "manifest.json"));
    CHECK(m["command"] == "simulate");
    CHECK(m["exit_code"] == 0);
    REQUIRE(m["artifacts"].size() == 3);
    for (const auto& art : m["artifacts"]) {
        const fs::path f = a / art["file"].get<std::string>();
        CHECK(fs::exists(f));
        CHECK(sha256_file(f.string()) == art["sha256"].get<std::string>());
    }
    CHECK(sha256_file(fs::path(a / "path.csv").string()) == sha256_file(fs::path(b / "path.csv").string()));
}

TEST_CASE("ingest reproduces the in-process estimate") {
    ExperimentConfig c;
    c.command = "simulate";
    c.n_list = {64};
    c.seed = 5;
    c.out = scratch("rt_sim").string();
    REQUIRE(run_quiet(c) == kExitOk);
    const fs::path sim = c.out;

    c.command = "estimate";
    c.out = scratch("rt_est").string();
    REQUIRE(run_quiet(c) == kExitOk);
    const fs::path est = c.out;

    ExperimentConfig in;
    in.command = "ingest";
    in.input = (sim / "path.csv").string();
    in.out = scratch("rt_ing").string();
    REQUIRE(run_quiet(in) == kExitOk);
    CHECK(slurp(est / "estimation.json") == slurp(fs::path(in.out) / "estimation.json"));
    CHECK(slurp(est / "reconstruction.csv") == slurp(fs::path(in.out) / "reconstruction.csv"));

    const json e = json::parse(slurp(est / "estimation.json"));
    CHECK(e["n"] == 64);
    CHECK(e["costs"].size() == e["grid"]["nu"].get<std::size_t>());

    std::ofstream(fs::path("runner_scratch") / "empty.csv") << "";
    in.input = (fs::path("runner_scratch") / "empty.csv").string();
    in.out = scratch("rt_empty").string();
    CHECK(run_quiet(in) == kExitConfig);
}

TEST_CASE("noiseless ingest recovers the signal") {
    ExperimentConfig c;
    c.command = "simulate";
    c.noise = NoiseParams{0.0, 0.0, 0.0, 0.0};
    c.n_list = {100};
    c.out = scratch("clean_sim").string();
    REQUIRE(run_quiet(c) == kExitOk);
    ExperimentConfig in;
    in.command = "ingest";
    in.input = (fs::path(c.out) / "path.csv").string();
    in.out = scratch("clean_ing").string();
    REQUIRE(run_quiet(in) == kExitOk);
    std::ifstream rec(fs::path(in.out) / "reconstruction.csv");
    std::string line;
    std::getline(rec, line);
    CHECK(line == "x,S_hat");
    std::ifstream est(fs::path(in.out) / "estimation.json");
    const json e = json::parse(est);
    const CoeffVector shrunk(e.at("final_coeffs").get<std::vector<double>>());
    double worst = 0.0, synth = 0.0;
    while (std::getline(rec, line)) {
        const auto comma = line.find(',');
        const double x = std::stod(line.substr(0, comma));
        const double s = std::stod(line.substr(comma + 1));
        synth = std::max(synth, std::abs(s - synthesize(shrunk, x)));
        worst = std::max(worst, std::abs(s - 0.16 * std::exp(std::cos(2 * 3.141592653589793 * x))));
    }
    CHECK(synth < 1e-12);
    // Pinsker shrinkage of the low frequencies dominates the error at n = 100
    CHECK(worst < 0.15);
}

TEST_CASE("moments table, audit failure and numerical failure codes") {
    ExperimentConfig c;
    c.command = "moments";
    c.n_list = {5};
    c.replicates = 400;
    c.dt = 1.0 / 32;
    c.out = scratch("mom").string();
    CHECK(run_quiet(c) == kExitOk);
    const json m = json::parse(slurp(fs::path(c.out) / "moments.json"));
    CHECK(m["cells"].size() == 16);

    // a one-cell-per-unit grid cannot resolve phi_2, so the table fails its z-test
    c.dt = 1.0;
    c.out = scratch("mom_bad").string();
    CHECK(run_quiet(c) == kExitAudit);
    CHECK(json::parse(slurp(fs::path(c.out) / "manifest.json"))["exit_code"] == kExitAudit);

    ExperimentConfig e;
    e.command = "efficiency";
    e.sigma_star = 100.0;  // r / sigma* below the grid pitch: t0 = 0
    e.n_list = {100};
    e.replicates = 100;
    e.out = scratch("eff_bad").string();
    CHECK(run_quiet(e) == kExitNumerical);
}

TEST_CASE("replay") {
    ExperimentConfig c;
    c.command = "audit-oracle";
    c.n_list = {100};
    c.replicates = 100;
    c.out = scratch("rep_src").string();
    REQUIRE(run_quiet(c) == kExitOk);
    std::ostringstream log;
    CHECK(replay((fs::path(c.out) / "manifest.json").string(), scratch("rep_dst").string(), log) == kExitOk);
    CHECK(log.str().find("DIFFERENT") == std::string::npos);
    CHECK(replay("runner_scratch/missing.json", scratch("rep_none").string(), log) == kExitConfig);
}
