#include "itpnet/nrrformer.hpp"

#include <cmath>

namespace itpnet {

std::pair<Tape::Id, Tape::Id> nrr_block(Tape& t, Tape::Id q, Tape::Id v_unobs, Tape::Id v_obs,
                                        const NrrBlockB& p, int heads, Activation act,
                                        std::vector<Tensor>* attn_trace) {
    const std::size_t C = t.val(q).rows();
    const std::size_t N = t.val(v_unobs).rows();
    const std::size_t d = t.val(q).cols();
    if (t.val(v_unobs).cols() != d || t.val(v_obs).cols() != d)
        throw ShapeError("nrr_block: width mismatch");

    const Tape::Id s1 = self_attention(t, t.concat_rows({q, v_unobs}), p.att1, heads, attn_trace);
    const Tape::Id q1 = t.slice_rows(s1, 0, C);
    const Tape::Id v1 = t.slice_rows(s1, C, C + N);

    const Tape::Id s2 = self_attention(t, t.concat_rows({q1, v_obs}), p.att2, heads, attn_trace);
    const Tape::Id q2 = t.slice_rows(s2, 0, C); // updated observed rows end here

    return {feed_forward(t, q2, p.ff, act), v1};
}

Tape::Id nrrformer_forward(Tape& t, Tape::Id q0, Tape::Id v_unobs, Tape::Id v_obs,
                           const std::vector<NrrBlockB>& blocks, int heads, Activation act,
                           std::vector<Tensor>* attn_trace) {
    if (blocks.empty()) throw ConfigError("nrrformer_forward: no blocks");
    Tape::Id q = q0;
    Tape::Id v = v_unobs;
    for (const NrrBlockB& b : blocks)
        std::tie(q, v) = nrr_block(t, q, v, v_obs, b, heads, act, attn_trace);
    return q;
}

Tape::Id concat_fallback(Tape& t, Tape::Id v_unobs, Tape::Id v_obs) {
    if (v_unobs < 0) return v_obs;
    if (t.val(v_unobs).cols() != t.val(v_obs).cols())
        throw ShapeError("concat_fallback: width mismatch");
    return t.concat_rows({v_unobs, v_obs});
}

Tape::Id add_positional(Tape& t, Tape::Id x, int offset) {
    const std::size_t rows = t.val(x).rows();
    const std::size_t d = t.val(x).cols();
    Tensor pe(rows, d);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            const double angle =
                double(int(r) + offset) / std::pow(10000.0, double(c / 2 * 2) / double(d));
            pe.at(r, c) = (c % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return t.add(x, t.constant(std::move(pe)));
}

} // namespace itpnet
