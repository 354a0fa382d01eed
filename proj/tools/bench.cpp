// Times the OpenMP fan-outs against their serial reference implementations
// and verifies they agree bit-for-bit. Usage: itpnet_bench [threads] [scenes].
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "itpnet/metrics.hpp"
#include "itpnet/parallel.hpp"
#include "itpnet/trainer.hpp"

using namespace itpnet;

namespace {

template <class F>
double time_best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
    std::printf("%-24s serial %8.4fs   parallel %8.4fs   speedup %5.2fx   %s\n", name, serial,
                parallel, serial / parallel, identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 4;
    const int n_scenes = argc > 2 ? std::atoi(argv[2]) : 256;

    TrainConfig cfg;
    cfg.batch_size = 32;
    DatasetSpec spec;
    spec.scenes = n_scenes;
    spec.history_len = cfg.N + cfg.T + 6;
    spec.future_len = cfg.M;

    std::printf("threads=%d scenes=%d d=%d N=%d\n\n", threads, n_scenes, cfg.d, cfg.N);
    bool all_ok = true;

    // dataset generation
    par::set_threads(1);
    std::vector<Trajectory> data_s;
    const double t_gen_s = time_best_of(3, [&] { data_s = generate_dataset_serial(spec); });
    par::set_threads(threads);
    std::vector<Trajectory> data_p;
    const double t_gen_p = time_best_of(3, [&] { data_p = generate_dataset(spec); });
    bool gen_ok = data_s.size() == data_p.size();
    for (std::size_t i = 0; gen_ok && i < data_s.size(); ++i) {
        gen_ok = data_s[i].t == data_p[i].t &&
                 data_s[i].points.size() == data_p[i].points.size();
        for (std::size_t j = 0; gen_ok && j < data_s[i].points.size(); ++j)
            gen_ok = data_s[i].points[j].x == data_p[i].points[j].x &&
                     data_s[i].points[j].y == data_p[i].points[j].y;
    }
    all_ok = all_ok && gen_ok;
    report("generate_dataset", t_gen_s, t_gen_p, gen_ok);

    // batch gradients
    const Model model = Model::init(cfg);
    std::vector<SegmentedSample> batch;
    for (int i = 0; i < cfg.batch_size; ++i) {
        const Trajectory& traj = data_s[std::size_t(i) % data_s.size()];
        batch.push_back(normalize_frame(
            segment(traj, cfg.T, cfg.N, cfg.M, end_aligned_cursor(traj, cfg.T, cfg.N, cfg.M))));
    }
    std::vector<Tensor> g_s, g_p;
    par::set_threads(1);
    const double t_bg_s = time_best_of(3, [&] { batch_gradients_serial(model, batch, g_s); });
    par::set_threads(threads);
    const double t_bg_p = time_best_of(3, [&] { batch_gradients(model, batch, g_p); });
    bool bg_ok = g_s.size() == g_p.size();
    for (std::size_t i = 0; bg_ok && i < g_s.size(); ++i) bg_ok = g_s[i] == g_p[i];
    all_ok = all_ok && bg_ok;
    report("batch_gradients", t_bg_s, t_bg_p, bg_ok);

    // evaluation
    par::set_threads(1);
    MetricsReport r_s;
    const double t_ev_s = time_best_of(3, [&] { r_s = evaluate_serial(model, data_s); });
    par::set_threads(threads);
    MetricsReport r_p;
    const double t_ev_p = time_best_of(3, [&] { r_p = evaluate(model, data_s); });
    const bool ev_ok = r_s.min_ade == r_p.min_ade && r_s.min_fde == r_p.min_fde &&
                       r_s.miss_rate == r_p.miss_rate;
    all_ok = all_ok && ev_ok;
    report("evaluate", t_ev_s, t_ev_p, ev_ok);

    std::printf("\n%s\n", all_ok ? "all parallel paths match their serial references"
                                 : "PARALLEL/SERIAL MISMATCH");
    return all_ok ? 0 : 1;
}
