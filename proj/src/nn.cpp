#include "itpnet/nn.hpp"

#include <cmath>

namespace itpnet {

Tape::Id linear(Tape& t, Tape::Id x, const LinearB& p) {
    return t.add_row(t.matmul(x, p.w), p.b);
}

Tape::Id activate(Tape& t, Tape::Id x, Activation act) {
    return act == Activation::Gelu ? t.gelu(x) : t.relu(x);
}

Activation activation_from(const std::string& name) {
    if (name == "gelu") return Activation::Gelu;
    if (name == "relu") return Activation::Relu;
    throw ConfigError("unknown activation: " + name);
}

std::pair<Tape::Id, Tape::Id> lstm_step(Tape& t, Tape::Id x, Tape::Id h, Tape::Id c,
                                        const LstmB& p) {
    const std::size_t d = t.val(h).cols();
    if (t.val(c).cols() != d || t.val(x).rows() != 1 || t.val(h).rows() != 1)
        throw ShapeError("lstm_step: x, h, c must be 1 x d rows");
    Tape::Id pre = t.add_row(t.add(t.matmul(x, p.wx), t.matmul(h, p.wh)), p.b);
    if (t.val(pre).cols() != 4 * d) throw ShapeError("lstm_step: fused projection is not 4d wide");
    Tape::Id i = t.sigmoid_(t.slice_cols(pre, 0, d));
    Tape::Id f = t.sigmoid_(t.slice_cols(pre, d, 2 * d));
    Tape::Id g = t.tanh_(t.slice_cols(pre, 2 * d, 3 * d));
    Tape::Id o = t.sigmoid_(t.slice_cols(pre, 3 * d, 4 * d));
    Tape::Id c2 = t.add(t.mul(f, c), t.mul(i, g));
    Tape::Id h2 = t.mul(o, t.tanh_(c2));
    return {h2, c2};
}

Tape::Id gru_step(Tape& t, Tape::Id x, Tape::Id h, const GruB& p) {
    const std::size_t d = t.val(h).cols();
    Tape::Id px = t.add_row(t.matmul(x, p.wx), p.b); // 1 x 3d
    Tape::Id ph = t.matmul(h, p.wh);                 // 1 x 3d
    if (t.val(px).cols() != 3 * d) throw ShapeError("gru_step: fused projection is not 3d wide");
    Tape::Id z = t.sigmoid_(t.add(t.slice_cols(px, 0, d), t.slice_cols(ph, 0, d)));
    Tape::Id r = t.sigmoid_(t.add(t.slice_cols(px, d, 2 * d), t.slice_cols(ph, d, 2 * d)));
    Tape::Id n = t.tanh_(t.add(t.slice_cols(px, 2 * d, 3 * d),
                               t.mul(r, t.slice_cols(ph, 2 * d, 3 * d))));
    // h' = (1 - z) * n + z * h  ==  n + z * (h - n)
    return t.add(n, t.mul(z, t.sub(h, n)));
}

Tape::Id self_attention(Tape& t, Tape::Id x, const AttnB& p, int heads,
                        std::vector<Tensor>* attn_rows) {
    const std::size_t len = t.val(x).rows();
    const std::size_t d = t.val(x).cols();
    if (len == 0) throw ShapeError("self_attention: empty sequence");
    if (heads < 1 || d % std::size_t(heads) != 0)
        throw ConfigError("self_attention: d must be divisible by head count");
    const std::size_t dh = d / std::size_t(heads);
    const double inv_sqrt = 1.0 / std::sqrt(double(dh));

    Tape::Id xn = t.layer_norm_rows(x, p.ln_g, p.ln_b);
    Tape::Id q = linear(t, xn, p.q);
    Tape::Id k = linear(t, xn, p.k);
    Tape::Id v = linear(t, xn, p.v);

    std::vector<Tape::Id> head_outs;
    head_outs.reserve(std::size_t(heads));
    for (int hh = 0; hh < heads; ++hh) {
        const std::size_t c0 = std::size_t(hh) * dh;
        Tape::Id qh = t.slice_cols(q, c0, c0 + dh);
        Tape::Id kh = t.slice_cols(k, c0, c0 + dh);
        Tape::Id vh = t.slice_cols(v, c0, c0 + dh);
        Tape::Id att = t.softmax_rows(t.scale(t.matmul_nt(qh, kh), inv_sqrt));
        if (attn_rows) attn_rows->push_back(t.val(att));
        head_outs.push_back(t.matmul(att, vh));
    }
    Tape::Id merged = heads == 1 ? head_outs[0] : t.concat_cols(head_outs);
    return t.add(x, linear(t, merged, p.o));
}

Tape::Id feed_forward(Tape& t, Tape::Id x, const FeedForwardB& p, Activation act) {
    Tape::Id xn = t.layer_norm_rows(x, p.ln_g, p.ln_b);
    Tape::Id hidden = activate(t, linear(t, xn, p.inner), act);
    return t.add(x, linear(t, hidden, p.outer));
}

Tensor init_xavier(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double stddev = std::sqrt(2.0 / double(fan_in + fan_out));
    return init_normal(fan_in, fan_out, stddev, rng);
}

Tensor init_normal(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
    Tensor t(rows, cols);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, stddev);
    return t;
}

} // namespace itpnet
