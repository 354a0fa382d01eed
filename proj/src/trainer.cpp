#include "itpnet/trainer.hpp"

#include <algorithm>
#include <charconv>
#include <exception>
#include <fstream>

#include "itpnet/checkpoint.hpp"
#include "itpnet/parallel.hpp"
#include "itpnet/tape.hpp"

namespace itpnet {

namespace {

struct SceneGrad {
    std::vector<Tensor> g;
    SceneTerms terms;
    double total = 0.0;
    std::exception_ptr err;
};

void scene_backward(const Model& model, const SegmentedSample& sample, SceneGrad& out) {
    Tape t;
    const ModelBinding b = model.bind(t);
    out.terms = model.scene_loss(t, b, sample);
    out.total = t.val(out.terms.total).item();
    t.backward(out.terms.total);
    out.g.clear();
    out.g.reserve(b.all.size());
    for (Tape::Id id : b.all) out.g.push_back(t.grad(id));
}

void add_into(Tensor& dst, const Tensor& src) {
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

LossRow batch_gradients_impl(const Model& model, const std::vector<SegmentedSample>& batch,
                             std::vector<Tensor>& grads, bool parallel) {
    if (batch.empty()) throw ConfigError("batch_gradients: empty batch");
    grads = model.params().zeros_like();

    // Chunk width bounds peak memory at thread_count gradient copies; the
    // reduction below walks scenes in ascending index regardless, so thread
    // count never changes a single bit of the result.
    const std::size_t width =
        parallel ? std::size_t(std::max(1, par::thread_count())) : std::size_t(1);
    std::vector<SceneGrad> slots(std::min(width, batch.size()));

    LossRow row;
    for (std::size_t base = 0; base < batch.size(); base += slots.size()) {
        const std::size_t count = std::min(slots.size(), batch.size() - base);
        const auto one = [&](std::size_t j) {
            slots[j].err = nullptr;
            try {
                scene_backward(model, batch[base + j], slots[j]);
            } catch (...) {
                slots[j].err = std::current_exception();
            }
        };
        if (parallel)
            par::parallel_for(count, one);
        else
            for (std::size_t j = 0; j < count; ++j) one(j);

        for (std::size_t j = 0; j < count; ++j) {
            if (slots[j].err) std::rethrow_exception(slots[j].err);
            for (std::size_t p = 0; p < grads.size(); ++p) add_into(grads[p], slots[j].g[p]);
            row.l_reg += slots[j].terms.reg;
            row.l_cls += slots[j].terms.cls;
            row.l_rec += slots[j].terms.rec;
            row.l_cts += slots[j].terms.cts;
            row.l_total += slots[j].total;
        }
    }

    const double inv = 1.0 / double(batch.size());
    for (Tensor& g : grads)
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= inv;
    row.l_reg *= inv;
    row.l_cls *= inv;
    row.l_rec *= inv;
    row.l_cts *= inv;
    row.l_total *= inv;
    return row;
}

std::string fmt(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

LossRow batch_gradients(const Model& model, const std::vector<SegmentedSample>& batch,
                        std::vector<Tensor>& grads) {
    return batch_gradients_impl(model, batch, grads, true);
}

LossRow batch_gradients_serial(const Model& model, const std::vector<SegmentedSample>& batch,
                               std::vector<Tensor>& grads) {
    return batch_gradients_impl(model, batch, grads, false);
}

TrainResult train(const TrainConfig& cfg, const std::vector<Trajectory>& scenes,
                  const CheckpointSink& sink, Model* resume_model, Adam* resume_opt,
                  long resume_step) {
    cfg.validate();
    if (scenes.empty()) throw DataError("train: no scenes");
    if (resume_step < 0 || resume_step > cfg.steps)
        throw ConfigError("train: resume step " + std::to_string(resume_step) +
                          " is outside [0, " + std::to_string(cfg.steps) + "]");

    // Segment and normalize everything up front: a single too-short
    // trajectory fails the run before any compute is spent.
    std::vector<SegmentedSample> samples(scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const Trajectory& traj = scenes[i];
        try {
            const int cursor = end_aligned_cursor(traj, cfg.T, cfg.N, cfg.M);
            samples[i] = normalize_frame(segment(traj, cfg.T, cfg.N, cfg.M, cursor));
        } catch (const Error& e) {
            throw DataError("train: scene " + traj.scene_id + "/" + traj.agent_id + ": " +
                            e.what());
        }
    }

    TrainResult res;
    if (resume_model) {
        require_compatible(resume_model->config(), cfg);
        res.model = std::move(*resume_model);
    } else {
        res.model = Model::init(cfg);
    }
    if (resume_opt) {
        res.opt = std::move(*resume_opt);
        res.opt.lr = cfg.lr;
    } else {
        res.opt.lr = cfg.lr;
        res.opt.init(res.model.params());
    }

    std::vector<Tensor> grads;
    for (long step = resume_step; step < cfg.steps; ++step) {
        // Stateless batch stream: step s always draws the same indices, so a
        // resumed run replays nothing and still matches the uninterrupted one.
        Rng rng(Rng::derive(cfg.seed, "batch", std::uint64_t(step)));
        std::vector<SegmentedSample> batch;
        batch.reserve(std::size_t(cfg.batch_size));
        for (int j = 0; j < cfg.batch_size; ++j)
            batch.push_back(samples[std::size_t(rng.uniform_int(0, long(samples.size()) - 1))]);

        LossRow row = batch_gradients(res.model, batch, grads);
        row.step = step + 1;
        res.opt.step(res.model.params(), grads);
        res.log.push_back(row);

        const long done = step + 1;
        if (sink && cfg.checkpoint_every > 0 && done % cfg.checkpoint_every == 0 &&
            done != cfg.steps)
            sink(res.model, res.opt, done);
    }
    if (sink) sink(res.model, res.opt, cfg.steps);
    return res;
}

void write_log_csv(const std::vector<LossRow>& log, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw DataError("cannot write training log: " + path);
    f << "step,l_reg,l_cls,l_rec,l_cts,l_total\n";
    for (const LossRow& r : log)
        f << r.step << ',' << fmt(r.l_reg) << ',' << fmt(r.l_cls) << ',' << fmt(r.l_rec) << ','
          << fmt(r.l_cts) << ',' << fmt(r.l_total) << '\n';
    if (!f) throw DataError("short write: " + path);
}

} // namespace itpnet
