#include "doctest.h"

#include <cstdio>
#include <fstream>

#include "itpnet/checkpoint.hpp"
#include "itpnet/metrics.hpp"
#include "itpnet/parallel.hpp"
#include "itpnet/trainer.hpp"

using namespace itpnet;

namespace {

TrainConfig train_config() {
    TrainConfig c;
    c.d = 16;
    c.heads = 2;
    c.N = 3;
    c.C = 2;
    c.L = 1;
    c.K = 3;
    c.M = 4;
    c.batch_size = 4;
    c.steps = 10;
    c.checkpoint_every = 1000; // periodic saves off unless a test dials it down
    return c;
}

std::vector<Trajectory> train_scenes(const TrainConfig& c, int n = 24) {
    DatasetSpec spec;
    spec.scenes = n;
    spec.history_len = c.N + c.T;
    spec.future_len = c.M;
    spec.seed = 21;
    return generate_dataset(spec);
}

std::vector<SegmentedSample> normalized_batch(const TrainConfig& c, int n) {
    std::vector<SegmentedSample> out;
    for (const Trajectory& traj : train_scenes(c, n))
        out.push_back(normalize_frame(segment(traj, c.T, c.N, c.M,
                                              end_aligned_cursor(traj, c.T, c.N, c.M))));
    return out;
}

bool same_tensors(const std::vector<Tensor>& a, const std::vector<Tensor>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] == b[i])) return false;
    return true;
}

bool same_params(const ParamStore& a, const ParamStore& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.name(i) != b.name(i) || !(a.at(i) == b.at(i))) return false;
    return true;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(bool(f));
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(bytes.data(), std::streamsize(bytes.size()));
}

struct TempPath {
    std::string path;
    explicit TempPath(const std::string& name) : path("itpnet_test_" + name) {}
    ~TempPath() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("batch gradients: thread count is invisible in the bits") {
    const TrainConfig cfg = train_config();
    const Model m = Model::init(cfg);
    const auto batch = normalized_batch(cfg, 5);

    std::vector<Tensor> g_serial, g_par1, g_par4;
    const LossRow r_serial = batch_gradients_serial(m, batch, g_serial);
    const LossRow r_par1 = batch_gradients(m, batch, g_par1);
    par::set_threads(4);
    const LossRow r_par4 = batch_gradients(m, batch, g_par4);
    par::set_threads(1);

    CHECK(same_tensors(g_serial, g_par1));
    CHECK(same_tensors(g_serial, g_par4));
    CHECK(r_serial.l_total == r_par1.l_total);
    CHECK(r_serial.l_total == r_par4.l_total);
    CHECK(r_serial.l_reg == r_par4.l_reg);
    CHECK(r_serial.l_cts == r_par4.l_cts);

    // the mean total is the weighted sum of the mean terms
    CHECK(r_serial.l_total == doctest::Approx(r_serial.l_reg + r_serial.l_cls +
                                              cfg.alpha * r_serial.l_rec +
                                              cfg.beta * r_serial.l_cts)
                                  .epsilon(1e-9));

    // something reached every parameter group
    std::size_t nonzero = 0;
    for (const Tensor& g : g_serial)
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g[i] != 0.0) ++nonzero;
    CHECK(nonzero > g_serial.size());

    std::vector<Tensor> unused;
    CHECK_THROWS_AS(batch_gradients(m, {}, unused), ConfigError);
}

TEST_CASE("training is deterministic for a fixed seed") {
    const TrainConfig cfg = train_config();
    const auto scenes = train_scenes(cfg);

    const TrainResult a = train(cfg, scenes);
    const TrainResult b = train(cfg, scenes);
    CHECK(same_params(a.model.params(), b.model.params()));
    REQUIRE(a.log.size() == 10);
    REQUIRE(b.log.size() == 10);
    for (std::size_t i = 0; i < a.log.size(); ++i) {
        CHECK(a.log[i].step == long(i + 1));
        CHECK(a.log[i].l_total == b.log[i].l_total);
    }

    TrainConfig other = cfg;
    other.seed = 2;
    const TrainResult c = train(other, scenes);
    CHECK_FALSE(same_params(a.model.params(), c.model.params()));
}

TEST_CASE("loss goes down") {
    TrainConfig cfg = train_config();
    cfg.steps = 200;
    const auto scenes = train_scenes(cfg);

    const TrainResult res = train(cfg, scenes);
    REQUIRE(res.log.size() == 200);
    double head = 0.0, tail = 0.0;
    for (int i = 0; i < 20; ++i) {
        head += res.log[std::size_t(i)].l_total;
        tail += res.log[res.log.size() - 20 + std::size_t(i)].l_total;
    }
    CHECK(tail < head * 0.8);

    // and the trained model beats the untrained one on its own data
    const Model fresh = Model::init(cfg);
    const MetricsReport before = evaluate(fresh, scenes);
    const MetricsReport after = evaluate(res.model, scenes);
    CHECK(after.min_ade < before.min_ade);
}

TEST_CASE("checkpoint round-trips every bit") {
    TrainConfig cfg = train_config();
    cfg.steps = 3;
    const auto scenes = train_scenes(cfg);
    TrainResult res = train(cfg, scenes);

    TempPath tmp("roundtrip.ckpt");
    save_checkpoint({res.model, res.opt, cfg.steps}, tmp.path);
    const Checkpoint back = load_checkpoint(tmp.path);

    CHECK(back.step == 3);
    CHECK(back.opt.step_count == res.opt.step_count);
    CHECK(back.model.config().hash() == cfg.hash());
    CHECK(same_params(back.model.params(), res.model.params()));
    CHECK(same_tensors(back.opt.m, res.opt.m));
    CHECK(same_tensors(back.opt.v, res.opt.v));

    // save -> load -> save is byte-identical
    TempPath tmp2("roundtrip2.ckpt");
    save_checkpoint(back, tmp2.path);
    CHECK(slurp(tmp.path) == slurp(tmp2.path));
}

TEST_CASE("checkpoint rejects damage, loudly and specifically") {
    const TrainConfig cfg = train_config();
    const Model m = Model::init(cfg);
    Adam opt;
    opt.init(m.params());
    TempPath tmp("damage.ckpt");
    save_checkpoint({m, opt, 0}, tmp.path);
    const std::string good = slurp(tmp.path);

    SUBCASE("flipped payload byte") {
        std::string bad = good;
        bad[bad.size() - 10] ^= 0x40;
        spit(tmp.path, bad);
        CHECK_THROWS_WITH_AS(load_checkpoint(tmp.path), doctest::Contains("checksum"), DataError);
    }
    SUBCASE("truncated file") {
        spit(tmp.path, good.substr(0, good.size() - 9));
        CHECK_THROWS_WITH_AS(load_checkpoint(tmp.path), doctest::Contains("truncated"), DataError);
    }
    SUBCASE("trailing bytes") {
        spit(tmp.path, good + "extra");
        CHECK_THROWS_WITH_AS(load_checkpoint(tmp.path), doctest::Contains("trailing"), DataError);
    }
    SUBCASE("wrong magic") {
        std::string bad = good;
        bad[0] = 'X';
        spit(tmp.path, bad);
        CHECK_THROWS_WITH_AS(load_checkpoint(tmp.path), doctest::Contains("magic"), DataError);
    }
    SUBCASE("unknown version") {
        std::string bad = good;
        bad[4] = 99; // little-endian low byte of the version word
        spit(tmp.path, bad);
        CHECK_THROWS_WITH_AS(load_checkpoint(tmp.path), doctest::Contains("version"), DataError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_checkpoint("no_such_file.ckpt"), DataError);
    }
}

TEST_CASE("config compatibility gate") {
    const TrainConfig a = train_config();

    TrainConfig b = a;
    b.d = 32;
    CHECK_THROWS_WITH_AS(require_compatible(a, b), doctest::Contains("d"), ConfigError);

    TrainConfig c = a;
    c.loss_family = LossFamily::SmoothL1Margin;
    CHECK_THROWS_WITH_AS(require_compatible(a, c), doctest::Contains("loss_family"), ConfigError);

    TrainConfig d = a;
    d.lr = 123.0; // optimizer knobs may change across a resume
    d.steps = 999;
    CHECK_NOTHROW(require_compatible(a, d));
}

TEST_CASE("resume from a checkpoint matches the uninterrupted run") {
    TrainConfig cfg = train_config();
    cfg.steps = 12;
    cfg.checkpoint_every = 6;
    const auto scenes = train_scenes(cfg);

    const TrainResult oneshot = train(cfg, scenes);

    TempPath tmp("resume.ckpt");
    const CheckpointSink sink = [&](const Model& m, const Adam& o, long step) {
        if (step == 6) save_checkpoint({m, o, step}, tmp.path);
    };
    train(cfg, scenes, sink);

    Checkpoint ck = load_checkpoint(tmp.path);
    CHECK(ck.step == 6);
    require_compatible(ck.model.config(), cfg);
    const TrainResult resumed = train(cfg, scenes, nullptr, &ck.model, &ck.opt, ck.step);

    CHECK(same_params(oneshot.model.params(), resumed.model.params()));
    CHECK(same_tensors(oneshot.opt.m, resumed.opt.m));
    REQUIRE(resumed.log.size() == 6);
    CHECK(resumed.log.front().step == 7);
    CHECK(resumed.log.back().l_total == oneshot.log.back().l_total);
}

TEST_CASE("training log CSV") {
    std::vector<LossRow> log{{1, 0.5, 0.25, 0.125, 0.0625, 0.76875},
                             {2, 1.0, 2.0, 3.0, 4.0, 10.0}};
    TempPath tmp("log.csv");
    write_log_csv(log, tmp.path);
    CHECK(slurp(tmp.path) == "step,l_reg,l_cls,l_rec,l_cts,l_total\n"
                             "1,0.5,0.25,0.125,0.0625,0.76875\n"
                             "2,1,2,3,4,10\n");
}

TEST_CASE("train validates its inputs up front") {
    const TrainConfig cfg = train_config();
    CHECK_THROWS_AS(train(cfg, {}), DataError);

    auto scenes = train_scenes(cfg);
    scenes[2].points.resize(3);
    scenes[2].t.resize(3);
    CHECK_THROWS_WITH_AS(train(cfg, scenes), doctest::Contains(scenes[2].scene_id.c_str()),
                         DataError);

    TrainConfig bad = cfg;
    bad.heads = 5; // does not divide d
    CHECK_THROWS_AS(train(bad, train_scenes(cfg)), ConfigError);
}
