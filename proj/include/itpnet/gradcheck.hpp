#pragma once

#include <functional>
#include <string>
#include <vector>

#include "itpnet/rng.hpp"
#include "itpnet/tape.hpp"

namespace itpnet {

/// A differentiable closure under test: given a tape and one node id per
/// entry of `inputs`, build and return a scalar loss node.
using TapeLoss = std::function<Tape::Id(Tape&, const std::vector<Tape::Id>&)>;

struct GradCheckReport {
    double max_rel_err = 0.0;
    std::size_t checked = 0;   // number of scalar entries compared
    std::size_t input_index = 0; // input tensor holding the worst entry
    std::size_t flat_index = 0;  // entry within that tensor
};

/// Central finite differences vs. tape gradients.
///
/// Perturbs entries of `inputs` in place (restoring them afterwards) and
/// re-evaluates `loss` forward-only. Relative error uses an absolute floor
/// of 1e-8 in the denominator. Entries where |analytic - fd| <= atol count
/// as exact agreement: central differences at 64-bit carry intrinsic
/// roundoff noise of about |loss| * 2^-52 / eps, so for parameters whose
/// true gradient is exactly zero (e.g. attention key biases, which cancel
/// under softmax's shift invariance) the fd estimate is pure noise and the
/// relative formula would compare noise against the floor. `max_samples` = 0
/// checks every entry; otherwise that many entries are sampled via rng.
GradCheckReport grad_check(const TapeLoss& loss, std::vector<Tensor>& inputs,
                           double eps = 1e-6, std::size_t max_samples = 0,
                           Rng* rng = nullptr, double atol = 1e-7);

} // namespace itpnet
