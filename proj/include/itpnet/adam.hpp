#pragma once

#include <vector>

#include "itpnet/params.hpp"

namespace itpnet {

/// Bias-corrected Adam over a ParamStore. Moment tensors are aligned with
/// the store's canonical parameter order.
struct Adam {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step_count = 0;
    std::vector<Tensor> m;
    std::vector<Tensor> v;

    void init(const ParamStore& store) {
        m = store.zeros_like();
        v = store.zeros_like();
        step_count = 0;
    }

    void step(ParamStore& store, const std::vector<Tensor>& grads);
};

} // namespace itpnet
