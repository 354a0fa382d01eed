#pragma once

#include <string>
#include <vector>

#include "itpnet/rng.hpp"
#include "itpnet/tape.hpp"

namespace itpnet {

enum class Activation { Gelu, Relu };

Activation activation_from(const std::string& name); // "gelu" | "relu"

// Parameter bindings: tape node ids for one layer's tensors. Bind once per
// tape from a ParamStore, then forward as often as needed.

struct LinearB {
    Tape::Id w; // in x out
    Tape::Id b; // 1 x out
};

struct LstmB {
    Tape::Id wx; // d x 4d, gate order i f g o
    Tape::Id wh; // d x 4d
    Tape::Id b;  // 1 x 4d
};

struct GruB {
    Tape::Id wx; // in x 3d, gate order z r n
    Tape::Id wh; // d x 3d
    Tape::Id b;  // 1 x 3d
};

struct AttnB {
    Tape::Id ln_g, ln_b; // pre-norm scale/shift, 1 x d
    LinearB q, k, v, o;
};

struct FeedForwardB {
    Tape::Id ln_g, ln_b;
    LinearB inner; // d x 4d
    LinearB outer; // 4d x d
};

Tape::Id linear(Tape& t, Tape::Id x, const LinearB& p);

Tape::Id activate(Tape& t, Tape::Id x, Activation act);

/// One LSTM cell step. x, h, c are 1 x d rows; returns (h', c').
/// Gate order in the fused projections is input, forget, cell, output.
std::pair<Tape::Id, Tape::Id> lstm_step(Tape& t, Tape::Id x, Tape::Id h, Tape::Id c,
                                        const LstmB& p);

/// One GRU cell step (update/reset/candidate order z r n); returns h'.
/// h' = (1 - z) * n + z * h.
Tape::Id gru_step(Tape& t, Tape::Id x, Tape::Id h, const GruB& p);

/// Multi-head scaled dot-product self-attention, pre-norm residual:
/// y = x + Wo * MHA(LN(x)). All-zero weights and biases give y == x exactly.
/// When `attn_rows` is non-null the post-softmax weight matrix of every head
/// is appended to it (len x len each), for inspection/tests.
Tape::Id self_attention(Tape& t, Tape::Id x, const AttnB& p, int heads,
                        std::vector<Tensor>* attn_rows = nullptr);

/// Position-wise feed-forward, pre-norm residual:
/// y = x + W2 * act(W1 * LN(x)). Zero weights give y == x exactly.
Tape::Id feed_forward(Tape& t, Tape::Id x, const FeedForwardB& p, Activation act);

// ---- initialization ----

/// Xavier/Glorot normal fill: std = sqrt(2 / (fan_in + fan_out)).
Tensor init_xavier(std::size_t fan_in, std::size_t fan_out, Rng& rng);
/// i.i.d. normal fill with the given std.
Tensor init_normal(std::size_t rows, std::size_t cols, double stddev, Rng& rng);

} // namespace itpnet
