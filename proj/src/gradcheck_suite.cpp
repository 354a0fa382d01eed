#include "itpnet/gradcheck_suite.hpp"

#include "itpnet/model.hpp"

namespace itpnet {

namespace {

Tensor rnd(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
    Tensor t(r, c);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, scale);
    return t;
}

// weighted sum so no gradient entry is accidentally uniform
Tape::Id reduce(Tape& t, Tape::Id x) {
    const Tensor& v = t.val(x);
    Tensor w(v.rows(), v.cols());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.1 * double(i + 1);
    return t.sum_all(t.mul(x, t.constant(std::move(w))));
}

struct Case {
    std::string name;
    TapeLoss f;
    std::vector<Tensor> inputs;
    std::size_t max_samples = 0;
    double tol = 1e-5;
};

} // namespace

std::vector<GradCheckRow> gradcheck_suite(std::uint64_t seed, bool end_to_end) {
    std::vector<Case> cases;
    const auto rng_for = [&](const std::string& name) { return Rng(Rng::derive(seed, name)); };
    const auto unary = [&](const std::string& name, Tape::Id (Tape::*op)(Tape::Id)) {
        Rng rng = rng_for(name);
        cases.push_back({name,
                         [op](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, (t.*op)(in[0]));
                         },
                         {rnd(3, 4, rng)}});
    };
    const auto binary = [&](const std::string& name,
                            Tape::Id (Tape::*op)(Tape::Id, Tape::Id)) {
        Rng rng = rng_for(name);
        cases.push_back({name,
                         [op](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, (t.*op)(in[0], in[1]));
                         },
                         {rnd(3, 4, rng), rnd(3, 4, rng)}});
    };

    binary("add", &Tape::add);
    binary("sub", &Tape::sub);
    binary("mul", &Tape::mul);
    {
        Rng rng = rng_for("div");
        cases.push_back({"div",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.div(in[0], in[1]));
                         },
                         {rnd(2, 3, rng), Tensor(2, 3, {1.5, 2.0, -1.7, 2.2, 3.0, -2.5})}});
    }
    {
        Rng rng = rng_for("scale");
        cases.push_back({"scale",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.scale(in[0], -1.7));
                         },
                         {rnd(3, 3, rng)}});
    }
    {
        Rng rng = rng_for("add_const");
        cases.push_back({"add_const",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.add_const(in[0], 0.3));
                         },
                         {rnd(3, 3, rng)}});
    }
    {
        Rng rng = rng_for("add_scalar");
        cases.push_back({"add_scalar",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.add_scalar(in[0], in[1], 2.5));
                         },
                         {rnd(3, 3, rng), Tensor::scalar(0.7)}});
    }
    unary("tanh", &Tape::tanh_);
    unary("sigmoid", &Tape::sigmoid_);
    unary("gelu", &Tape::gelu);
    unary("softplus", &Tape::softplus);
    cases.push_back({"relu",
                     [](Tape& t, const std::vector<Tape::Id>& in) {
                         return reduce(t, t.relu(in[0]));
                     },
                     {Tensor(2, 2, {0.5, -0.7, 1.2, -2.0})}}); // clear of the kink
    cases.push_back({"abs",
                     [](Tape& t, const std::vector<Tape::Id>& in) {
                         return reduce(t, t.abs_(in[0]));
                     },
                     {Tensor(2, 2, {0.5, -0.7, 1.2, -2.0})}});
    cases.push_back({"log_floor",
                     [](Tape& t, const std::vector<Tape::Id>& in) {
                         return reduce(t, t.log_floor(in[0]));
                     },
                     {Tensor(2, 2, {0.5, 0.9, 1.2, 2.0})}});
    {
        Rng rng = rng_for("matmul");
        cases.push_back({"matmul",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.matmul(in[0], in[1]));
                         },
                         {rnd(3, 4, rng), rnd(4, 2, rng)}});
    }
    {
        Rng rng = rng_for("matmul_nt");
        cases.push_back({"matmul_nt",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.matmul_nt(in[0], in[1]));
                         },
                         {rnd(3, 4, rng), rnd(5, 4, rng)}});
    }
    {
        Rng rng = rng_for("add_row");
        cases.push_back({"add_row",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.add_row(in[0], in[1]));
                         },
                         {rnd(3, 4, rng), rnd(1, 4, rng)}});
    }
    {
        Rng rng = rng_for("concat_rows/slice_rows");
        cases.push_back({"concat_rows/slice_rows",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             Tape::Id cat = t.concat_rows({in[0], in[1]});
                             return reduce(t, t.slice_rows(cat, 1, 3));
                         },
                         {rnd(2, 3, rng), rnd(2, 3, rng)}});
    }
    {
        Rng rng = rng_for("concat_cols/slice_cols");
        cases.push_back({"concat_cols/slice_cols",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             Tape::Id cat = t.concat_cols({in[0], in[1]});
                             return reduce(t, t.slice_cols(cat, 1, 5));
                         },
                         {rnd(2, 3, rng), rnd(2, 3, rng)}});
    }
    {
        Rng rng = rng_for("reshape");
        cases.push_back({"reshape",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.reshape(in[0], 2, 6));
                         },
                         {rnd(3, 4, rng)}});
    }
    {
        Rng rng = rng_for("sum_all");
        cases.push_back({"sum_all",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return t.sum_all(t.mul(in[0], in[0]));
                         },
                         {rnd(3, 4, rng)}});
    }
    {
        Rng rng = rng_for("mean_rows");
        cases.push_back({"mean_rows",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.mean_rows(in[0]));
                         },
                         {rnd(5, 4, rng)}});
    }
    {
        Rng rng = rng_for("softmax_rows");
        cases.push_back({"softmax_rows",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.softmax_rows(in[0]));
                         },
                         {rnd(3, 5, rng)}});
    }
    {
        Rng rng = rng_for("layer_norm_rows");
        cases.push_back({"layer_norm_rows",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, t.layer_norm_rows(in[0], in[1], in[2]));
                         },
                         {rnd(3, 6, rng), rnd(1, 6, rng), rnd(1, 6, rng)}});
    }
    cases.push_back({"smooth_l1_norm",
                     [](Tape& t, const std::vector<Tape::Id>& in) {
                         return t.add(t.smooth_l1_norm(in[0]), t.smooth_l1_norm(in[1]));
                     },
                     {Tensor::row({0.1, -0.2, 0.15}), Tensor::row({1.1, -0.7, 0.4})}});

    const std::size_t d = 8;
    const int heads = 2;
    {
        Rng rng = rng_for("linear");
        cases.push_back({"linear",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return reduce(t, activate(t, linear(t, in[0], {in[1], in[2]}),
                                                       Activation::Gelu));
                         },
                         {rnd(3, d, rng), rnd(d, d, rng, 0.4), rnd(1, d, rng, 0.1)}});
    }
    {
        Rng rng = rng_for("lstm_step");
        cases.push_back({"lstm_step",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             LstmB p{in[0], in[1], in[2]};
                             auto [h2, c2] = lstm_step(t, in[3], in[4], in[5], p);
                             return t.sum_all(t.add(t.mul(h2, h2), c2));
                         },
                         {rnd(d, 4 * d, rng, 0.4), rnd(d, 4 * d, rng, 0.4),
                          rnd(1, 4 * d, rng, 0.4), rnd(1, d, rng), rnd(1, d, rng),
                          rnd(1, d, rng)}});
    }
    {
        Rng rng = rng_for("gru_step");
        cases.push_back({"gru_step",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             GruB p{in[0], in[1], in[2]};
                             Tape::Id h2 = gru_step(t, in[3], in[4], p);
                             return t.sum_all(t.mul(h2, h2));
                         },
                         {rnd(d, 3 * d, rng, 0.4), rnd(d, 3 * d, rng, 0.4),
                          rnd(1, 3 * d, rng, 0.4), rnd(1, d, rng), rnd(1, d, rng)}});
    }
    {
        Rng rng = rng_for("self_attention");
        std::vector<Tensor> in{rnd(3, d, rng)};
        for (int i = 0; i < 4; ++i) {
            in.push_back(rnd(d, d, rng, 0.4));
            in.push_back(rnd(1, d, rng, 0.1));
        }
        in.push_back(Tensor::full(1, d, 1.0));
        in.push_back(rnd(1, d, rng, 0.1));
        cases.push_back({"self_attention",
                         [heads](Tape& t, const std::vector<Tape::Id>& in) {
                             AttnB p;
                             p.q = {in[1], in[2]};
                             p.k = {in[3], in[4]};
                             p.v = {in[5], in[6]};
                             p.o = {in[7], in[8]};
                             p.ln_g = in[9];
                             p.ln_b = in[10];
                             Tape::Id y = self_attention(t, in[0], p, heads);
                             return t.sum_all(t.mul(y, y));
                         },
                         std::move(in)});
    }
    {
        Rng rng = rng_for("feed_forward");
        cases.push_back({"feed_forward",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             FeedForwardB p;
                             p.inner = {in[1], in[2]};
                             p.outer = {in[3], in[4]};
                             p.ln_g = in[5];
                             p.ln_b = in[6];
                             Tape::Id y = feed_forward(t, in[0], p, Activation::Gelu);
                             return t.sum_all(t.mul(y, y));
                         },
                         {rnd(3, d, rng), rnd(d, 4 * d, rng, 0.3), rnd(1, 4 * d, rng, 0.1),
                          rnd(4 * d, d, rng, 0.3), rnd(1, d, rng, 0.1), Tensor::full(1, d, 1.0),
                          rnd(1, d, rng, 0.1)}});
    }
    {
        Rng rng = rng_for("loss_rec");
        cases.push_back({"loss_rec",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return loss_rec(t, in[0], in[1]);
                         },
                         {rnd(3, d, rng), rnd(3, d, rng)}});
    }
    {
        Rng rng = rng_for("loss_cts");
        cases.push_back({"loss_cts",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             return loss_cts(t, in[0], in[1], 1.0);
                         },
                         {rnd(3, d, rng), rnd(3, d, rng)}});
    }
    {
        Rng rng = rng_for("loss_reg_laplace");
        const std::vector<Vec2> gt{{0.4, -0.2}, {0.9, 0.1}, {1.3, 0.6}};
        Tensor scales(3, 2);
        for (std::size_t i = 0; i < scales.size(); ++i) scales[i] = 0.4 + 0.2 * double(i);
        cases.push_back({"loss_reg_laplace",
                         [gt](Tape& t, const std::vector<Tape::Id>& in) {
                             return loss_reg_laplace(t, in[0], in[1], gt);
                         },
                         {rnd(3, 2, rng), std::move(scales)}});
    }
    {
        Rng rng = rng_for("loss_cls");
        cases.push_back({"loss_cls",
                         [](Tape& t, const std::vector<Tape::Id>& in) {
                             Tape::Id s = t.softmax_rows(in[0]);
                             return t.add(loss_cls_ce(t, s, 1),
                                          loss_cls_margin(t, s, 1, 0.2));
                         },
                         {rnd(1, 6, rng)}});
    }

    std::vector<GradCheckRow> rows;
    for (Case& c : cases) {
        Rng srng(Rng::derive(seed, c.name, 1));
        const GradCheckReport rep =
            grad_check(c.f, c.inputs, 1e-6, c.max_samples, c.max_samples ? &srng : nullptr);
        rows.push_back({c.name, rep.max_rel_err, rep.checked, c.tol});
    }

    if (end_to_end) {
        TrainConfig cfg;
        cfg.d = 8;
        cfg.heads = 2;
        cfg.N = 3;
        cfg.C = 2;
        cfg.L = 1;
        cfg.K = 2;
        cfg.M = 3;
        const Model m = Model::init(cfg);

        ScenarioSpec ss;
        ss.kind = ScenarioKind::ConstantTurn;
        ss.length = cfg.N + cfg.T + cfg.M;
        const SegmentedSample sample =
            normalize_frame(segment(generate_scene(ss, seed + 5), cfg.T, cfg.N, cfg.M));

        std::vector<Tensor> inputs;
        for (std::size_t i = 0; i < m.params().size(); ++i) inputs.push_back(m.params().at(i));
        const TapeLoss f = [&m, &sample](Tape& t, const std::vector<Tape::Id>& ids) {
            return m.scene_loss(t, m.wire(ids), sample).total;
        };
        Rng srng(Rng::derive(seed, "end_to_end", 1));
        const GradCheckReport rep = grad_check(f, inputs, 1e-6, 250, &srng);
        rows.push_back({"end_to_end", rep.max_rel_err, rep.checked, 1e-4});
    }
    return rows;
}

} // namespace itpnet
