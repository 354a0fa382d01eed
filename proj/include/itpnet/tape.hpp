#pragma once

#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "itpnet/tensor.hpp"

namespace itpnet {

/// Reverse-mode gradient tape over Tensor-valued primitives.
///
/// Forward calls append nodes; backward() replays the recorded closures in
/// reverse and accumulates gradients. Parameters registered through param()
/// are referenced, not copied, and must outlive the tape. Every primitive
/// verifies its output is finite and throws NumericError otherwise, so a
/// NaN/Inf is caught at the op that produced it. Tapes are single-owner and
/// not thread-safe; use one tape per scene.
class Tape {
public:
    using Id = int;

    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    /// Leaf referencing external storage (no copy). Caller keeps `t` alive.
    Id param(const Tensor& t);
    /// Leaf owning its value.
    Id constant(Tensor t);

    /// Stable reference: nodes live in a deque, so growing the tape never
    /// invalidates values returned here.
    const Tensor& val(Id id) const {
        return nodes_[std::size_t(id)].ext ? *nodes_[std::size_t(id)].ext
                                           : nodes_[std::size_t(id)].owned;
    }
    /// Gradient of the last backward()'s loss w.r.t. node `id` (exact zero if untouched).
    const Tensor& grad(Id id) const;

    /// Seeds d(loss)/d(loss) = 1 and accumulates gradients into every node.
    void backward(Id loss);

    std::size_t size() const { return nodes_.size(); }

    // ---- elementwise ----
    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id mul(Id a, Id b);
    Id div(Id a, Id b);
    Id scale(Id a, double c);
    Id add_const(Id a, double c);
    /// x + c*s where s is a 1x1 node broadcast over x.
    Id add_scalar(Id x, Id s, double c);
    Id tanh_(Id a);
    Id sigmoid_(Id a);
    Id gelu(Id a);
    Id relu(Id a);
    Id softplus(Id a);
    Id abs_(Id a);
    /// log(max(x, floor)); zero gradient on the clamped branch.
    Id log_floor(Id a, double floor = 1e-12);

    // ---- matrix ----
    Id matmul(Id a, Id b);    // A @ B
    Id matmul_nt(Id a, Id b); // A @ B^T
    Id add_row(Id x, Id bias); // x[m x n] + bias[1 x n] per row

    // ---- structure ----
    Id concat_rows(const std::vector<Id>& parts);
    Id slice_rows(Id a, std::size_t r0, std::size_t r1); // rows [r0, r1)
    Id slice_cols(Id a, std::size_t c0, std::size_t c1); // cols [c0, c1)
    Id concat_cols(const std::vector<Id>& parts);
    Id reshape(Id a, std::size_t rows, std::size_t cols);

    // ---- reductions / normalizations ----
    Id sum_all(Id a);           // 1x1
    Id mean_rows(Id a);         // len x d -> 1 x d
    Id softmax_rows(Id a);
    Id layer_norm_rows(Id x, Id gamma, Id beta); // eps = 1e-5
    /// Smooth-L1 of the l1 norm of all entries: s = sum|x|; 0.5*s^2 if s < 1
    /// else s - 0.5. Returns 1x1.
    Id smooth_l1_norm(Id a);

private:
    struct Node {
        Tensor owned;
        const Tensor* ext = nullptr;
        std::function<void(Tape&, Id)> back; // empty for leaves
    };

    Id push(Tensor value, std::function<void(Tape&, Id)> back, const char* op);
    Tensor& grad_mut(Id id);
    void bump(Id id) { touched_[std::size_t(id)] = true; }

    std::deque<Node> nodes_;
    std::vector<Tensor> grads_;
    std::vector<char> touched_;
    bool ran_backward_ = false;
};

/// Plain (tape-free) smooth L1 of the l1 norm of v, matching Tape::smooth_l1_norm.
double smooth_l1(const std::vector<double>& v);

} // namespace itpnet
