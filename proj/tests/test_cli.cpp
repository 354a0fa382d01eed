#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "itpnet/cli.hpp"

using namespace itpnet;
using nlohmann::json;

namespace {

int run(std::vector<std::string> args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int rc = run_cli(std::move(args), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(bool(f));
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << text;
}

// every artifact of one test case under a throwaway directory
struct TempDir {
    std::string path;
    explicit TempDir(const std::string& name) : path("itpnet_cli_" + name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string operator/(const std::string& leaf) const { return path + "/" + leaf; }
};

// small model + matching dataset windows: history = N + T, future = M
const char* kTinyConfig = R"({
  "d": 16, "heads": 2, "N": 3, "C": 2, "L": 1, "K": 3, "M": 4,
  "batch_size": 4, "steps": 12, "checkpoint_every": 100, "seed": 5,
  "dataset": {"scenes": 16, "history_len": 5, "future_len": 4, "seed": 5}
})";

} // namespace

TEST_CASE("cli: usage problems exit 1 and explain themselves") {
    std::string out, err;

    CHECK(run({"frobnicate"}, &out, &err) == 1);
    CHECK(err.find("usage error") != std::string::npos);

    CHECK(run({}, &out, &err) == 1); // a subcommand is required
    CHECK(run({"train", "--out", "x"}, &out, &err) == 1); // --data missing

    CHECK(run({"--help"}, &out, &err) == 0);
    CHECK(out.find("gen-data") != std::string::npos);
    CHECK(out.find("ablate") != std::string::npos);
}

TEST_CASE("cli: config errors exit 1, data errors exit 2") {
    TempDir dir("errors");
    std::string out, err;

    spit(dir / "bad.json", "{\"no_such_knob\": 1}");
    CHECK(run({"gen-data", "--config", dir / "bad.json", "--out", dir / "x.jsonl"}, &out,
              &err) == 1);
    CHECK(err.find("config error") != std::string::npos);

    CHECK(run({"train", "--data", dir / "absent.jsonl", "--out", dir / "run"}, &out, &err) == 2);
    CHECK(err.find("data error") != std::string::npos);

    CHECK(run({"predict", "--checkpoint", dir / "absent.itpn", "--points", "0,0;1,1"}, &out,
              &err) == 2);
}

TEST_CASE("cli: gen-data is deterministic and --seed wins over the file") {
    TempDir dir("gen");
    spit(dir / "cfg.json", kTinyConfig);

    std::string out;
    REQUIRE(run({"gen-data", "--config", dir / "cfg.json", "--out", dir / "a.jsonl"}, &out) == 0);
    CHECK(out.find("wrote 16 scenes") != std::string::npos);
    REQUIRE(run({"gen-data", "--config", dir / "cfg.json", "--out", dir / "b.jsonl"}) == 0);
    CHECK(slurp(dir / "a.jsonl") == slurp(dir / "b.jsonl"));

    // sidecar records the generating spec
    const json meta = json::parse(slurp(dir / "a.jsonl.meta.json"));
    CHECK(meta.at("dataset").at("scenes") == 16);
    CHECK(meta.at("dataset").at("seed") == 5);

    // --seed 9 on this config == a config that says seed 9
    REQUIRE(run({"gen-data", "--config", dir / "cfg.json", "--seed", "9", "--out",
                 dir / "c.jsonl"}) == 0);
    std::string cfg9 = kTinyConfig;
    const auto at = cfg9.rfind("\"seed\": 5");
    cfg9.replace(at, 9, "\"seed\": 9");
    spit(dir / "cfg9.json", cfg9);
    REQUIRE(run({"gen-data", "--config", dir / "cfg9.json", "--out", dir / "d.jsonl"}) == 0);
    CHECK(slurp(dir / "c.jsonl") == slurp(dir / "d.jsonl"));
    CHECK(slurp(dir / "c.jsonl") != slurp(dir / "a.jsonl"));

    // scene count override
    REQUIRE(run({"gen-data", "--config", dir / "cfg.json", "--scenes", "3", "--out",
                 dir / "e.jsonl"}) == 0);
    int lines = 0;
    std::stringstream ss(slurp(dir / "e.jsonl"));
    for (std::string line; std::getline(ss, line);) ++lines;
    CHECK(lines == 3);

    CHECK(run({"gen-data", "--config", dir / "cfg.json", "--spec", "weird", "--out",
               dir / "f.jsonl"}) == 1);
}

TEST_CASE("cli: train, eval, predict round-trip") {
    TempDir dir("roundtrip");
    spit(dir / "cfg.json", kTinyConfig);
    REQUIRE(run({"gen-data", "--config", dir / "cfg.json", "--out", dir / "data.jsonl"}) == 0);

    std::string out;
    REQUIRE(run({"train", "--config", dir / "cfg.json", "--data", dir / "data.jsonl", "--out",
                 dir / "run"}, &out) == 0);
    CHECK(out.find("trained 12 steps") != std::string::npos);

    const std::string log = slurp(dir / "run/training_log.csv");
    CHECK(log.rfind("step,l_reg,l_cls,l_rec,l_cts,l_total\n", 0) == 0);
    const json run_cfg = json::parse(slurp(dir / "run/config.json"));
    CHECK(run_cfg.at("train").at("steps") == 12);

    REQUIRE(run({"eval", "--checkpoint", dir / "run/checkpoint.itpn", "--data",
                 dir / "data.jsonl", "--out", dir / "ev"}, &out) == 0);
    CHECK(out.find("K=1:") != std::string::npos);
    CHECK(out.find("K=3:") != std::string::npos);
    const std::string metrics = slurp(dir / "ev/metrics.csv");
    CHECK(metrics.rfind("config_hash,N,nrrformer,l_rec,l_cts,T,K,seed,minADE,minFDE,MR\n", 0) ==
          0);

    // out-of-range K is a usage error
    CHECK(run({"eval", "--checkpoint", dir / "run/checkpoint.itpn", "--data", dir / "data.jsonl",
               "--out", dir / "ev2", "--k", "99"}) == 1);

    REQUIRE(run({"predict", "--checkpoint", dir / "run/checkpoint.itpn", "--points",
                 "0,0;1.2,0.6"}, &out) == 0);
    const json pred = json::parse(out);
    REQUIRE(pred.at("trajectories").size() == 3);
    for (const auto& traj : pred.at("trajectories")) {
        REQUIRE(traj.size() == 4);
        for (const auto& p : traj) CHECK(p.size() == 2);
    }
    double score_sum = 0.0;
    for (const auto& s : pred.at("scores")) score_sum += s.get<double>();
    CHECK(score_sum == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(run({"predict", "--checkpoint", dir / "run/checkpoint.itpn", "--points", "zero,zero"}) ==
          1);
}

TEST_CASE("cli: ablate sweeps the grid reproducibly") {
    TempDir dir("ablate");
    std::string cfg = kTinyConfig;
    cfg.insert(cfg.rfind('}'),
               ", \"sweep\": {\"n_values\": [0, 3], \"nrrformer\": [false, true], "
               "\"seeds\": [1]}");
    spit(dir / "cfg.json", cfg);
    REQUIRE(run({"gen-data", "--config", dir / "cfg.json", "--out", dir / "data.jsonl"}) == 0);

    std::string out, err;
    REQUIRE(run({"ablate", "--config", dir / "cfg.json", "--train-data", dir / "data.jsonl",
                 "--eval-data", dir / "data.jsonl", "--out", dir / "s1"}, &out, &err) == 0);
    CHECK(out.find("skipped") != std::string::npos); // N=0 + NRRFormer is undefined
    CHECK(out.find("minADE medians") != std::string::npos);
    CHECK(std::filesystem::exists(dir / "s1/plot_minADE.svg"));

    REQUIRE(run({"ablate", "--config", dir / "cfg.json", "--train-data", dir / "data.jsonl",
                 "--eval-data", dir / "data.jsonl", "--out", dir / "s2"}) == 0);
    CHECK(slurp(dir / "s1/metrics.csv") == slurp(dir / "s2/metrics.csv"));
}

TEST_CASE("cli: gradcheck battery passes and can write a CSV") {
    TempDir dir("gradcheck");
    std::string out;
    REQUIRE(run({"gradcheck", "--seed", "5", "--out", dir / "grad.csv"}, &out) == 0);
    CHECK(out.find("all checks passed") != std::string::npos);
    CHECK(out.find("end_to_end") != std::string::npos);
    CHECK(slurp(dir / "grad.csv").rfind("check,entries,max_rel_err,tol,status\n", 0) == 0);
}
