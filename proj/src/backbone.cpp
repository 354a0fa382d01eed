#include "itpnet/backbone.hpp"

namespace itpnet {

Tape::Id encode(Tape& t, const std::vector<Vec2>& points, const BackboneB& p, Activation act) {
    if (points.empty()) throw ShapeError("encode: empty location sequence");
    const std::size_t len = points.size();
    Tensor disp(len, 2);
    for (std::size_t i = 1; i < len; ++i) {
        disp.at(i, 0) = points[i].x - points[i - 1].x;
        disp.at(i, 1) = points[i].y - points[i - 1].y;
    }
    const Tape::Id e = activate(t, linear(t, t.constant(std::move(disp)), p.embed), act);

    const std::size_t d = t.val(p.gru.wh).rows();
    Tape::Id h = t.constant(Tensor(1, d));
    std::vector<Tape::Id> rows;
    rows.reserve(len);
    for (std::size_t i = 0; i < len; ++i) {
        h = gru_step(t, t.slice_rows(e, i, i + 1), h, p.gru);
        rows.push_back(h);
    }
    return len == 1 ? rows[0] : t.concat_rows(rows);
}

} // namespace itpnet
