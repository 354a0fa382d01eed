#pragma once

#include "itpnet/nn.hpp"

namespace itpnet {

/// Backward forecaster: one LSTM cell plus a linear head emitting a d-vector
/// feature per unobserved timestep.
struct ForecasterB {
    LstmB cell;   // input d, hidden d
    LinearB head; // d x d
};

/// Features for time indices -N+1..0, earliest first. Index 0 comes from one
/// LSTM step on Mean(v_obs) from the zero state; each earlier feature feeds
/// the previous output back while carrying (h, c) — autoregressive, backward
/// in time. N = 0 returns -1 (no node).
Tape::Id forecast_unobserved(Tape& t, Tape::Id v_obs, const ForecasterB& p, int N);

/// Sum over paired rows of the smooth-L1 feature reconstruction error.
Tape::Id loss_rec(Tape& t, Tape::Id v_true, Tape::Id v_pred);

/// Contrastive hinge over within-sample negatives: for every i and j != i,
/// max(0, d(v_i, vhat_i) - d(v_i, vhat_j) + delta) with d = smooth-L1.
/// Single-row inputs have no negatives and give a constant 0.
Tape::Id loss_cts(Tape& t, Tape::Id v_true, Tape::Id v_pred, double delta);

} // namespace itpnet
