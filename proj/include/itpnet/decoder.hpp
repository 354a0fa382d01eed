#pragma once

#include "itpnet/data.hpp"
#include "itpnet/nn.hpp"

namespace itpnet {

/// Multimodal decoder heads over a flattened 1 x F feature row.
struct DecoderB {
    LinearB traj{-1, -1};  // F x (K*M*2)
    LinearB scale{-1, -1}; // F x (K*M*2); bound only for the Laplace family
    LinearB score{-1, -1}; // F x K
};

/// Node handles for one decode. `traj` packs K modes of M steps as a
/// (K*M) x 2 matrix — mode k occupies rows [k*M, (k+1)*M) — holding
/// agent-frame positions relative to the last observed point. `scales`
/// mirrors that layout (softplus + 1e-3 floor; -1 without a scale head).
/// `scores` is the 1 x K softmax of `logits`.
struct Decoded {
    Tape::Id traj = -1;
    Tape::Id scales = -1;
    Tape::Id logits = -1;
    Tape::Id scores = -1;
    int K = 0;
    int M = 0;
};

Decoded decode(Tape& t, Tape::Id features, const DecoderB& p, int K, int M);

/// Winner-takes-all index: argmin over modes of the mean pointwise L2
/// distance to x_gt (final-point distance with endpoint = true); ties take
/// the lowest index. Piecewise constant in the inputs, so computed on plain
/// values rather than taped.
int wta_select(const Tensor& traj, const std::vector<Vec2>& x_gt, int K, int M,
               bool endpoint = false);

Tape::Id mode_rows(Tape& t, const Decoded& d, int k);
Tape::Id mode_scale_rows(Tape& t, const Decoded& d, int k);

/// Laplace NLL: sum over steps and coordinates of log(2b) + |mu - x| / b.
Tape::Id loss_reg_laplace(Tape& t, Tape::Id traj_k, Tape::Id scales_k,
                          const std::vector<Vec2>& x_gt);

/// -log scores[k_star], probability floored at 1e-12.
Tape::Id loss_cls_ce(Tape& t, Tape::Id scores, int k_star);

/// Sum over steps of the smooth-L1 of the (dx, dy) residual.
Tape::Id loss_reg_smooth_l1(Tape& t, Tape::Id traj_k, const std::vector<Vec2>& x_gt);

/// (1 / (K-1)) * sum_{k != k_star} max(0, scores[k] + eps - scores[k_star]);
/// defined as 0 for K = 1.
Tape::Id loss_cls_margin(Tape& t, Tape::Id scores, int k_star, double eps);

/// reg + cls + alpha * rec + beta * cts. rec/cts may be -1 (absent). Checks
/// every present component is finite and names the offender otherwise.
Tape::Id total_loss(Tape& t, Tape::Id reg, Tape::Id cls, Tape::Id rec, Tape::Id cts, double alpha,
                    double beta);

} // namespace itpnet
