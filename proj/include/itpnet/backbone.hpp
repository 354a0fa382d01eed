#pragma once

#include "itpnet/data.hpp"
#include "itpnet/nn.hpp"

namespace itpnet {

/// Reference encoder: per-step displacement -> linear embedding ->
/// activation -> single-layer causal GRU. Stands in for heavier temporal
/// encoders; anything honoring encode()'s contract is a drop-in.
struct BackboneB {
    LinearB embed; // 2 x d
    GruB gru;      // hidden d
};

/// Per-step features for `points`, one row per location (len x d). Causal:
/// row i depends only on points 0..i, so encoding a prefix equals the prefix
/// of the encoding. The first step uses a zero displacement (a point without
/// a predecessor has no motion vector).
Tape::Id encode(Tape& t, const std::vector<Vec2>& points, const BackboneB& p, Activation act);

} // namespace itpnet
