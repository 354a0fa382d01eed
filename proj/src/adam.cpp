#include "itpnet/adam.hpp"

#include <cmath>

namespace itpnet {

void Adam::step(ParamStore& store, const std::vector<Tensor>& grads) {
    if (m.size() != store.size() || grads.size() != store.size())
        throw ShapeError("Adam::step: state/gradient count mismatch");
    ++step_count;
    const double bc1 = 1.0 - std::pow(beta1, double(step_count));
    const double bc2 = 1.0 - std::pow(beta2, double(step_count));
    for (std::size_t p = 0; p < store.size(); ++p) {
        Tensor& theta = store.at(p);
        const Tensor& g = grads[p];
        if (!theta.same_shape(g))
            throw ShapeError("Adam::step: gradient shape mismatch at " + store.name(p));
        if (!g.all_finite())
            throw NumericError("Adam::step: non-finite gradient at " + store.name(p));
        Tensor& mp = m[p];
        Tensor& vp = v[p];
        for (std::size_t i = 0; i < theta.size(); ++i) {
            mp[i] = beta1 * mp[i] + (1.0 - beta1) * g[i];
            vp[i] = beta2 * vp[i] + (1.0 - beta2) * g[i] * g[i];
            const double mhat = mp[i] / bc1;
            const double vhat = vp[i] / bc2;
            theta[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

} // namespace itpnet
