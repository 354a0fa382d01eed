#pragma once

#include <functional>

#include "itpnet/adam.hpp"
#include "itpnet/model.hpp"

namespace itpnet {

/// One line of the training log CSV (step,l_reg,l_cls,l_rec,l_cts,l_total).
struct LossRow {
    long step = 0;
    double l_reg = 0.0;
    double l_cls = 0.0;
    double l_rec = 0.0;
    double l_cts = 0.0;
    double l_total = 0.0;
};

struct TrainResult {
    Model model;
    Adam opt;
    std::vector<LossRow> log;
};

/// Called after every cfg.checkpoint_every steps and once at the end.
using CheckpointSink = std::function<void(const Model&, const Adam&, long step)>;

/// Mean loss terms and the mean total-loss gradient over a batch of
/// frame-normalized samples. One tape per scene; the OpenMP variant fans the
/// scenes out but reduces in scene-index order, so both variants agree to
/// the last bit for any thread count.
LossRow batch_gradients(const Model& model, const std::vector<SegmentedSample>& batch,
                        std::vector<Tensor>& grads);
LossRow batch_gradients_serial(const Model& model, const std::vector<SegmentedSample>& batch,
                               std::vector<Tensor>& grads);

/// Full run: segment + normalize every scene up front (data errors surface
/// before step 0), then Adam on per-step batches drawn from a stream derived
/// from (seed, "batch", step) — resuming at step s needs no replay.
TrainResult train(const TrainConfig& cfg, const std::vector<Trajectory>& scenes,
                  const CheckpointSink& sink = nullptr, Model* resume_model = nullptr,
                  Adam* resume_opt = nullptr, long resume_step = 0);

void write_log_csv(const std::vector<LossRow>& log, const std::string& path);

} // namespace itpnet
