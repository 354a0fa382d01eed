#include "itpnet/model.hpp"

namespace itpnet {

Model Model::init(const TrainConfig& cfg) {
    cfg.validate();
    Model m;
    m.cfg_ = cfg;
    ParamStore& ps = m.params_;
    const std::size_t d = std::size_t(cfg.d);

    // every tensor draws from its own (seed, name) stream, so adding or
    // removing a parameter never shifts the values of the others
    const auto weight = [&](const std::string& name, std::size_t in, std::size_t out) {
        Rng r(Rng::derive(cfg.seed, name));
        ps.add(name, init_xavier(in, out, r));
    };
    const auto zeros = [&](const std::string& name, std::size_t cols) {
        ps.add(name, Tensor(1, cols));
    };
    const auto ones = [&](const std::string& name, std::size_t cols) {
        ps.add(name, Tensor::full(1, cols, 1.0));
    };

    weight("phi.embed.w", 2, d);
    zeros("phi.embed.b", d);
    weight("phi.gru.wx", d, 3 * d);
    weight("phi.gru.wh", d, 3 * d);
    zeros("phi.gru.b", 3 * d);

    weight("psi.lstm.wx", d, 4 * d);
    weight("psi.lstm.wh", d, 4 * d);
    {
        Tensor b(1, 4 * d);
        for (std::size_t i = d; i < 2 * d; ++i) b[i] = 1.0; // forget gate open at init
        ps.add("psi.lstm.b", std::move(b));
    }
    weight("psi.head.w", d, d);
    zeros("psi.head.b", d);

    if (cfg.nrrformer) {
        Rng r(Rng::derive(cfg.seed, "q0"));
        ps.add("q0", init_normal(std::size_t(cfg.C), d, 0.02, r));
        for (int l = 0; l < cfg.L; ++l) {
            const std::string base = "nrr.l" + std::to_string(l) + ".";
            for (const char* att : {"att1.", "att2."}) {
                const std::string a = base + att;
                ones(a + "ln_g", d);
                zeros(a + "ln_b", d);
                for (const char* h : {"q.", "k.", "v.", "o."}) {
                    weight(a + h + "w", d, d);
                    zeros(a + h + "b", d);
                }
            }
            const std::string f = base + "ff.";
            ones(f + "ln_g", d);
            zeros(f + "ln_b", d);
            weight(f + "w1.w", d, 4 * d);
            zeros(f + "w1.b", 4 * d);
            weight(f + "w2.w", 4 * d, d);
            zeros(f + "w2.b", d);
        }
    }

    const std::size_t F =
        cfg.nrrformer ? std::size_t(cfg.C) * d : std::size_t(cfg.N + cfg.T) * d;
    const std::size_t KM2 = std::size_t(cfg.K) * std::size_t(cfg.M) * 2;
    weight("omega.traj.w", F, KM2);
    zeros("omega.traj.b", KM2);
    if (cfg.loss_family == LossFamily::LaplaceCe) {
        weight("omega.scale.w", F, KM2);
        zeros("omega.scale.b", KM2);
    }
    weight("omega.score.w", F, std::size_t(cfg.K));
    zeros("omega.score.b", std::size_t(cfg.K));
    return m;
}

ModelBinding Model::bind(Tape& t) const {
    std::vector<Tape::Id> ids;
    ids.reserve(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) ids.push_back(t.param(params_.at(i)));
    return wire(ids);
}

ModelBinding Model::wire(const std::vector<Tape::Id>& ids) const {
    if (ids.size() != params_.size()) throw ShapeError("Model::wire: id count != parameter count");
    ModelBinding b;
    b.all = ids;
    const auto id = [&](const std::string& n) { return b.all[params_.index_of(n)]; };

    b.phi.embed = {id("phi.embed.w"), id("phi.embed.b")};
    b.phi.gru = {id("phi.gru.wx"), id("phi.gru.wh"), id("phi.gru.b")};
    b.psi.cell = {id("psi.lstm.wx"), id("psi.lstm.wh"), id("psi.lstm.b")};
    b.psi.head = {id("psi.head.w"), id("psi.head.b")};

    if (cfg_.nrrformer) {
        b.q0 = id("q0");
        b.nrr.reserve(std::size_t(cfg_.L));
        for (int l = 0; l < cfg_.L; ++l) {
            const std::string base = "nrr.l" + std::to_string(l) + ".";
            const auto att = [&](const std::string& a) {
                AttnB p;
                p.ln_g = id(a + "ln_g");
                p.ln_b = id(a + "ln_b");
                p.q = {id(a + "q.w"), id(a + "q.b")};
                p.k = {id(a + "k.w"), id(a + "k.b")};
                p.v = {id(a + "v.w"), id(a + "v.b")};
                p.o = {id(a + "o.w"), id(a + "o.b")};
                return p;
            };
            NrrBlockB blk;
            blk.att1 = att(base + "att1.");
            blk.att2 = att(base + "att2.");
            blk.ff.ln_g = id(base + "ff.ln_g");
            blk.ff.ln_b = id(base + "ff.ln_b");
            blk.ff.inner = {id(base + "ff.w1.w"), id(base + "ff.w1.b")};
            blk.ff.outer = {id(base + "ff.w2.w"), id(base + "ff.w2.b")};
            b.nrr.push_back(blk);
        }
    }

    b.omega.traj = {id("omega.traj.w"), id("omega.traj.b")};
    if (params_.contains("omega.scale.w"))
        b.omega.scale = {id("omega.scale.w"), id("omega.scale.b")};
    b.omega.score = {id("omega.score.w"), id("omega.score.b")};
    return b;
}

Tape::Id Model::features_row(Tape& t, const ModelBinding& b, const SegmentedSample& s,
                             Tape::Id* v_obs_out, Tape::Id* v_pred_out) const {
    if (int(s.x_obs.size()) != cfg_.T) throw ShapeError("model: observed window length != T");
    const Activation act = activation_from(cfg_.activation);
    const std::size_t d = std::size_t(cfg_.d);

    const Tape::Id v_obs = encode(t, s.x_obs, b.phi, act);
    const Tape::Id v_pred = forecast_unobserved(t, v_obs, b.psi, cfg_.N);
    if (v_obs_out) *v_obs_out = v_obs;
    if (v_pred_out) *v_pred_out = v_pred;

    if (cfg_.nrrformer) {
        Tape::Id vu = v_pred;
        Tape::Id vo = v_obs;
        if (cfg_.positional_encoding) {
            vu = add_positional(t, vu, 0);
            vo = add_positional(t, vo, cfg_.N);
        }
        const Tape::Id ql = nrrformer_forward(t, b.q0, vu, vo, b.nrr, cfg_.heads, act);
        return t.reshape(ql, 1, std::size_t(cfg_.C) * d);
    }
    return t.reshape(concat_fallback(t, v_pred, v_obs), 1, std::size_t(cfg_.N + cfg_.T) * d);
}

Decoded Model::forward(Tape& t, const ModelBinding& b, const SegmentedSample& sample) const {
    return decode(t, features_row(t, b, sample, nullptr, nullptr), b.omega, cfg_.K, cfg_.M);
}

SceneTerms Model::scene_loss(Tape& t, const ModelBinding& b, const SegmentedSample& s) const {
    if (int(s.x_unobs.size()) != cfg_.N) throw ShapeError("model: unobserved window length != N");
    if (int(s.x_gt.size()) != cfg_.M) throw ShapeError("model: future window length != M");
    const Activation act = activation_from(cfg_.activation);

    Tape::Id v_obs = -1;
    Tape::Id v_pred = -1;
    const Tape::Id z = features_row(t, b, s, &v_obs, &v_pred);

    Tape::Id rec = -1;
    Tape::Id cts = -1;
    if (cfg_.N > 0) {
        BackboneB target_phi = b.phi;
        if (cfg_.stop_gradient_targets) {
            // rebind the backbone weights as constants so L_rec/L_cts push
            // no gradient through the target path
            target_phi.embed = {t.constant(t.val(b.phi.embed.w)),
                                t.constant(t.val(b.phi.embed.b))};
            target_phi.gru = {t.constant(t.val(b.phi.gru.wx)), t.constant(t.val(b.phi.gru.wh)),
                              t.constant(t.val(b.phi.gru.b))};
        }
        // causality makes this identical to the first N rows of encoding
        // the full [unobs | obs] history
        const Tape::Id v_true = encode(t, s.x_unobs, target_phi, act);
        rec = loss_rec(t, v_true, v_pred);
        cts = loss_cts(t, v_true, v_pred, cfg_.delta);
    }

    const Decoded dec = decode(t, z, b.omega, cfg_.K, cfg_.M);
    const int k_star = wta_select(t.val(dec.traj), s.x_gt, cfg_.K, cfg_.M, cfg_.wta_endpoint);
    const Tape::Id traj_k = mode_rows(t, dec, k_star);

    Tape::Id reg = -1;
    Tape::Id cls = -1;
    if (cfg_.loss_family == LossFamily::LaplaceCe) {
        reg = loss_reg_laplace(t, traj_k, mode_scale_rows(t, dec, k_star), s.x_gt);
        cls = loss_cls_ce(t, dec.scores, k_star);
    } else {
        reg = loss_reg_smooth_l1(t, traj_k, s.x_gt);
        cls = loss_cls_margin(t, dec.scores, k_star, cfg_.margin_eps);
    }

    SceneTerms out;
    out.total = total_loss(t, reg, cls, rec, cts, cfg_.alpha, cfg_.beta);
    out.reg = t.val(reg).item();
    out.cls = t.val(cls).item();
    if (rec >= 0) out.rec = t.val(rec).item();
    if (cts >= 0) out.cts = t.val(cts).item();
    return out;
}

PredictionSet Model::predict(const std::vector<Vec2>& x_obs_world) const {
    if (int(x_obs_world.size()) != cfg_.T)
        throw ConfigError("predict: expected exactly " + std::to_string(cfg_.T) +
                          " observed points, got " + std::to_string(x_obs_world.size()));
    SegmentedSample raw;
    raw.x_obs = x_obs_world;
    const SegmentedSample s = normalize_frame(raw);

    Tape t;
    const ModelBinding b = bind(t);
    const Decoded dec = forward(t, b, s);
    const Tensor& traj = t.val(dec.traj);
    const Tensor& sc = t.val(dec.scores);

    PredictionSet out;
    out.trajectories.reserve(std::size_t(cfg_.K));
    for (int k = 0; k < cfg_.K; ++k) {
        std::vector<Vec2> mode;
        mode.reserve(std::size_t(cfg_.M));
        for (int i = 0; i < cfg_.M; ++i) {
            const std::size_t r = std::size_t(k) * std::size_t(cfg_.M) + std::size_t(i);
            mode.push_back(s.frame.invert({traj.at(r, 0), traj.at(r, 1)}));
        }
        out.trajectories.push_back(std::move(mode));
        out.scores.push_back(sc.at(0, std::size_t(k)));
    }
    return out;
}

} // namespace itpnet
