#include "itpnet/decoder.hpp"

#include <cmath>
#include <limits>

namespace itpnet {

namespace {

Tensor gt_tensor(const std::vector<Vec2>& x_gt) {
    Tensor g(x_gt.size(), 2);
    for (std::size_t i = 0; i < x_gt.size(); ++i) {
        g.at(i, 0) = x_gt[i].x;
        g.at(i, 1) = x_gt[i].y;
    }
    return g;
}

} // namespace

Decoded decode(Tape& t, Tape::Id features, const DecoderB& p, int K, int M) {
    if (K < 1 || M < 1) throw ConfigError("decode: K and M must be positive");
    Decoded d;
    d.K = K;
    d.M = M;
    d.traj = t.reshape(linear(t, features, p.traj), std::size_t(K) * M, 2);
    if (p.scale.w >= 0) {
        const Tape::Id s = t.add_const(t.softplus(linear(t, features, p.scale)), 1e-3);
        d.scales = t.reshape(s, std::size_t(K) * M, 2);
    }
    d.logits = linear(t, features, p.score);
    d.scores = t.softmax_rows(d.logits);
    return d;
}

int wta_select(const Tensor& traj, const std::vector<Vec2>& x_gt, int K, int M, bool endpoint) {
    if (int(x_gt.size()) != M) throw ShapeError("wta_select: ground truth length != M");
    if (traj.rows() != std::size_t(K) * M || traj.cols() != 2)
        throw ShapeError("wta_select: trajectory matrix is not (K*M) x 2");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
        double dist;
        if (endpoint) {
            const std::size_t r = std::size_t(k) * M + M - 1;
            dist = std::hypot(traj.at(r, 0) - x_gt[M - 1].x, traj.at(r, 1) - x_gt[M - 1].y);
        } else {
            dist = 0.0;
            for (int i = 0; i < M; ++i) {
                const std::size_t r = std::size_t(k) * M + i;
                dist += std::hypot(traj.at(r, 0) - x_gt[i].x, traj.at(r, 1) - x_gt[i].y);
            }
            dist /= double(M);
        }
        if (dist < best_d) {
            best_d = dist;
            best = k;
        }
    }
    return best;
}

Tape::Id mode_rows(Tape& t, const Decoded& d, int k) {
    return t.slice_rows(d.traj, std::size_t(k) * d.M, std::size_t(k + 1) * d.M);
}

Tape::Id mode_scale_rows(Tape& t, const Decoded& d, int k) {
    if (d.scales < 0) throw ConfigError("mode_scale_rows: decoder has no scale head");
    return t.slice_rows(d.scales, std::size_t(k) * d.M, std::size_t(k + 1) * d.M);
}

Tape::Id loss_reg_laplace(Tape& t, Tape::Id traj_k, Tape::Id scales_k,
                          const std::vector<Vec2>& x_gt) {
    const Tensor& b = t.val(scales_k);
    if (!t.val(traj_k).same_shape(b) || t.val(traj_k).rows() != x_gt.size())
        throw ShapeError("loss_reg_laplace: shape mismatch");
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i] <= 0.0) throw ConfigError("loss_reg_laplace: non-positive scale");
    const Tape::Id gt = t.constant(gt_tensor(x_gt));
    const Tape::Id absdiff = t.abs_(t.sub(traj_k, gt));
    // log(2b) never hits the floor: b >= 1e-3
    const Tape::Id term = t.add(t.log_floor(t.scale(scales_k, 2.0)), t.div(absdiff, scales_k));
    return t.sum_all(term);
}

Tape::Id loss_cls_ce(Tape& t, Tape::Id scores, int k_star) {
    const Tensor& s = t.val(scores);
    if (k_star < 0 || std::size_t(k_star) >= s.cols())
        throw ShapeError("loss_cls_ce: winner index out of range");
    return t.scale(t.log_floor(t.slice_cols(scores, std::size_t(k_star), std::size_t(k_star) + 1)),
                   -1.0);
}

Tape::Id loss_reg_smooth_l1(Tape& t, Tape::Id traj_k, const std::vector<Vec2>& x_gt) {
    const Tensor& a = t.val(traj_k);
    if (a.rows() != x_gt.size() || a.cols() != 2)
        throw ShapeError("loss_reg_smooth_l1: shape mismatch");
    const Tape::Id diff = t.sub(traj_k, t.constant(gt_tensor(x_gt)));
    Tape::Id total = -1;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const Tape::Id term = t.smooth_l1_norm(t.slice_rows(diff, i, i + 1));
        total = total < 0 ? term : t.add(total, term);
    }
    return total;
}

Tape::Id loss_cls_margin(Tape& t, Tape::Id scores, int k_star, double eps) {
    if (eps < 0.0) throw ConfigError("loss_cls_margin: negative margin");
    const Tensor& s = t.val(scores);
    const int K = int(s.cols());
    if (k_star < 0 || k_star >= K) throw ShapeError("loss_cls_margin: winner index out of range");
    if (K == 1) return t.constant(Tensor::scalar(0.0));
    const Tape::Id pk = t.slice_cols(scores, std::size_t(k_star), std::size_t(k_star) + 1);
    Tape::Id total = -1;
    for (int k = 0; k < K; ++k) {
        if (k == k_star) continue;
        const Tape::Id term = t.relu(
            t.add_const(t.sub(t.slice_cols(scores, std::size_t(k), std::size_t(k) + 1), pk), eps));
        total = total < 0 ? term : t.add(total, term);
    }
    return t.scale(total, 1.0 / double(K - 1));
}

Tape::Id total_loss(Tape& t, Tape::Id reg, Tape::Id cls, Tape::Id rec, Tape::Id cts, double alpha,
                    double beta) {
    const auto check = [&](Tape::Id id, const char* name) {
        if (id >= 0 && !t.val(id).all_finite())
            throw NumericError(std::string("total_loss: ") + name + " is not finite");
    };
    check(reg, "reg");
    check(cls, "cls");
    check(rec, "rec");
    check(cts, "cts");
    if (reg < 0 || cls < 0) throw ConfigError("total_loss: reg and cls are required");
    Tape::Id total = t.add(reg, cls);
    if (rec >= 0 && alpha != 0.0) total = t.add(total, t.scale(rec, alpha));
    if (cts >= 0 && beta != 0.0) total = t.add(total, t.scale(cts, beta));
    return total;
}

} // namespace itpnet
