#include "itpnet/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace itpnet {

namespace {

double eval_loss(const TapeLoss& loss, const std::vector<Tensor>& inputs) {
    Tape t;
    std::vector<Tape::Id> ids;
    ids.reserve(inputs.size());
    for (const Tensor& in : inputs) ids.push_back(t.param(in));
    return t.val(loss(t, ids)).item();
}

} // namespace

GradCheckReport grad_check(const TapeLoss& loss, std::vector<Tensor>& inputs,
                           double eps, std::size_t max_samples, Rng* rng, double atol) {
    if (eps <= 0.0) throw ConfigError("grad_check: eps must be positive");

    // analytic pass
    Tape tape;
    std::vector<Tape::Id> ids;
    ids.reserve(inputs.size());
    for (const Tensor& in : inputs) ids.push_back(tape.param(in));
    tape.backward(loss(tape, ids));
    std::vector<Tensor> analytic;
    analytic.reserve(ids.size());
    for (Tape::Id id : ids) analytic.push_back(tape.grad(id));

    // choose entries
    std::vector<std::pair<std::size_t, std::size_t>> picks;
    std::size_t total = 0;
    for (const Tensor& in : inputs) total += in.size();
    if (max_samples == 0 || max_samples >= total) {
        for (std::size_t i = 0; i < inputs.size(); ++i)
            for (std::size_t j = 0; j < inputs[i].size(); ++j)
                picks.emplace_back(i, j);
    } else {
        if (!rng) throw ConfigError("grad_check: sampling requires an rng");
        for (std::size_t s = 0; s < max_samples; ++s) {
            std::size_t flat = std::size_t(rng->uniform_int(0, long(total) - 1));
            std::size_t i = 0;
            while (flat >= inputs[i].size()) { flat -= inputs[i].size(); ++i; }
            picks.emplace_back(i, flat);
        }
    }

    GradCheckReport rep;
    rep.checked = picks.size();
    for (auto [i, j] : picks) {
        const double orig = inputs[i][j];
        inputs[i][j] = orig + eps;
        const double fp = eval_loss(loss, inputs);
        inputs[i][j] = orig - eps;
        const double fm = eval_loss(loss, inputs);
        inputs[i][j] = orig;
        const double fd = (fp - fm) / (2.0 * eps);
        const double an = analytic[i][j];
        const double diff = std::fabs(an - fd);
        if (diff <= atol) continue; // indistinguishable from fd roundoff
        const double denom = std::max(1e-8, std::max(std::fabs(an), std::fabs(fd)));
        const double rel = diff / denom;
        if (rel > rep.max_rel_err) {
            rep.max_rel_err = rel;
            rep.input_index = i;
            rep.flat_index = j;
        }
    }
    return rep;
}

} // namespace itpnet
