#pragma once

#include "itpnet/nn.hpp"

namespace itpnet {

/// One compression block: two self-attention stages and a feed-forward,
/// each with independent parameters, all pre-norm residual at width d.
struct NrrBlockB {
    AttnB att1; // over [q ; v_unobs]
    AttnB att2; // over [q ; v_obs]
    FeedForwardB ff;
};

/// Stage 1: self-attention over the stacked [q ; v_unobs], split back into
/// the C query rows and the N feature rows. Stage 2: self-attention over
/// [q' ; v_obs]; only the query rows survive — the updated observed rows
/// carry no noise or redundancy worth propagating and are dropped. Stage 3:
/// feed-forward on the query rows.
///
/// Shape-generic in C and N; the C < N compression requirement is enforced
/// where configurations are constructed (TrainConfig::validate). Each
/// attention stage appends its per-head weight matrices to `attn_trace`
/// when non-null.
std::pair<Tape::Id, Tape::Id> nrr_block(Tape& t, Tape::Id q, Tape::Id v_unobs, Tape::Id v_obs,
                                        const NrrBlockB& p, int heads, Activation act,
                                        std::vector<Tensor>* attn_trace = nullptr);

/// Chains blocks, threading (q, v_unobs) and re-reading the same v_obs in
/// every block; returns the final C x d query.
Tape::Id nrrformer_forward(Tape& t, Tape::Id q0, Tape::Id v_unobs, Tape::Id v_obs,
                           const std::vector<NrrBlockB>& blocks, int heads, Activation act,
                           std::vector<Tensor>* attn_trace = nullptr);

/// Ablation path bypassing the blocks: rows 0..N-1 are v_unobs, rows
/// N..N+T-1 are v_obs. Pass v_unobs = -1 when N = 0 (returns v_obs).
Tape::Id concat_fallback(Tape& t, Tape::Id v_unobs, Tape::Id v_obs);

/// Adds fixed sinusoidal position terms to each row, with the row's
/// sequence position shifted by `offset`. Off by default everywhere; the
/// LSTM unroll already orders features temporally.
Tape::Id add_positional(Tape& t, Tape::Id x, int offset);

} // namespace itpnet
