#pragma once

#include "itpnet/backbone.hpp"
#include "itpnet/config.hpp"
#include "itpnet/decoder.hpp"
#include "itpnet/forecaster.hpp"
#include "itpnet/nrrformer.hpp"
#include "itpnet/params.hpp"

namespace itpnet {

/// Tape node ids for every parameter of one model, in named sub-structures
/// for the forward pass plus `all` aligned with the ParamStore order for
/// gradient extraction.
struct ModelBinding {
    BackboneB phi;
    ForecasterB psi;
    Tape::Id q0 = -1;
    std::vector<NrrBlockB> nrr;
    DecoderB omega;
    std::vector<Tape::Id> all;
};

/// Per-scene loss node plus the component values for logging.
struct SceneTerms {
    Tape::Id total = -1;
    double reg = 0.0;
    double cls = 0.0;
    double rec = 0.0;
    double cts = 0.0;
};

/// K scored world-frame futures for one agent.
struct PredictionSet {
    std::vector<std::vector<Vec2>> trajectories; // K x M
    std::vector<double> scores;                  // K, sums to 1
};

/// Owns the config and every learnable tensor; stateless apart from them.
/// Forward passes run on a caller-provided tape, one tape per scene.
class Model {
public:
    /// Validates the config and initializes all parameters from per-name
    /// derived RNG streams (reordering insertions cannot shift values).
    static Model init(const TrainConfig& cfg);

    const TrainConfig& config() const { return cfg_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }

    ModelBinding bind(Tape& t) const;

    /// Wires pre-registered tape ids (one per parameter, in store order)
    /// into the named binding structure. bind() is param() + wire(); grad
    /// checks use wire() directly on ids bound to perturbed copies.
    ModelBinding wire(const std::vector<Tape::Id>& ids) const;

    /// Decoder output for one frame-normalized sample (no losses).
    Decoded forward(Tape& t, const ModelBinding& b, const SegmentedSample& sample) const;

    /// Full training-loss graph for one frame-normalized sample: encode the
    /// observed window, backward-forecast the unobserved features, compress
    /// (or concatenate), decode, then winner-takes-all regression +
    /// classification plus the two self-supervised terms.
    SceneTerms scene_loss(Tape& t, const ModelBinding& b, const SegmentedSample& sample) const;

    /// Inference on T world-frame points: normalize, forward, denormalize.
    PredictionSet predict(const std::vector<Vec2>& x_obs_world) const;

private:
    TrainConfig cfg_;
    ParamStore params_;

    Tape::Id features_row(Tape& t, const ModelBinding& b, const SegmentedSample& sample,
                          Tape::Id* v_obs_out, Tape::Id* v_pred_out) const;
};

} // namespace itpnet
