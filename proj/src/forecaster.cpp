#include "itpnet/forecaster.hpp"

namespace itpnet {

Tape::Id forecast_unobserved(Tape& t, Tape::Id v_obs, const ForecasterB& p, int N) {
    if (N < 0) throw ConfigError("forecast_unobserved: N < 0");
    if (t.val(v_obs).rows() < 1) throw ShapeError("forecast_unobserved: empty v_obs");
    if (N == 0) return -1;

    const std::size_t d = t.val(p.cell.wh).rows();
    Tape::Id h = t.constant(Tensor(1, d));
    Tape::Id c = t.constant(Tensor(1, d));
    Tape::Id x = t.mean_rows(v_obs);
    std::vector<Tape::Id> newest_first;
    newest_first.reserve(std::size_t(N));
    for (int i = 0; i < N; ++i) {
        std::tie(h, c) = lstm_step(t, x, h, c, p.cell);
        const Tape::Id v = linear(t, h, p.head);
        newest_first.push_back(v);
        x = v;
    }
    std::vector<Tape::Id> rows(newest_first.rbegin(), newest_first.rend());
    return rows.size() == 1 ? rows[0] : t.concat_rows(rows);
}

Tape::Id loss_rec(Tape& t, Tape::Id v_true, Tape::Id v_pred) {
    const Tensor& a = t.val(v_true);
    if (!a.same_shape(t.val(v_pred)))
        throw ShapeError("loss_rec: feature sequences differ in shape");
    if (a.rows() == 0) throw ShapeError("loss_rec: empty sequences");
    const Tape::Id diff = t.sub(v_true, v_pred);
    Tape::Id total = -1;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const Tape::Id term = t.smooth_l1_norm(t.slice_rows(diff, i, i + 1));
        total = total < 0 ? term : t.add(total, term);
    }
    return total;
}

Tape::Id loss_cts(Tape& t, Tape::Id v_true, Tape::Id v_pred, double delta) {
    if (delta < 0.0) throw ConfigError("loss_cts: negative margin");
    const Tensor& a = t.val(v_true);
    if (!a.same_shape(t.val(v_pred)))
        throw ShapeError("loss_cts: feature sequences differ in shape");
    const std::size_t n = a.rows();
    if (n == 0) throw ShapeError("loss_cts: empty sequences");
    if (n == 1) return t.constant(Tensor::scalar(0.0));

    std::vector<Tape::Id> dist(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const Tape::Id vi = t.slice_rows(v_true, i, i + 1);
        for (std::size_t j = 0; j < n; ++j)
            dist[i * n + j] = t.smooth_l1_norm(t.sub(vi, t.slice_rows(v_pred, j, j + 1)));
    }
    Tape::Id total = -1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Tape::Id hinge =
                t.relu(t.add_const(t.sub(dist[i * n + i], dist[i * n + j]), delta));
            total = total < 0 ? hinge : t.add(total, hinge);
        }
    return total;
}

} // namespace itpnet
