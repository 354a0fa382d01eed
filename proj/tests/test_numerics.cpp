#include "doctest.h"

#include <cmath>

#include "itpnet/adam.hpp"
#include "itpnet/gradcheck.hpp"
#include "itpnet/nn.hpp"
#include "itpnet/rng.hpp"
#include "itpnet/tape.hpp"

using namespace itpnet;

namespace {

Tensor random_tensor(std::size_t r, std::size_t c, Rng& rng, double scale = 1.0) {
    Tensor t(r, c);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.normal(0.0, scale);
    return t;
}

} // namespace

TEST_CASE("tensor basics and matmul kernels") {
    Tensor a(2, 3, {1, 2, 3, 4, 5, 6});
    Tensor b(3, 2, {7, 8, 9, 10, 11, 12});
    Tensor out;
    mat_mul(a, b, out);
    CHECK(out.rows() == 2);
    CHECK(out.cols() == 2);
    CHECK(out.at(0, 0) == doctest::Approx(58).epsilon(1e-14));
    CHECK(out.at(1, 1) == doctest::Approx(154).epsilon(1e-14));

    // A @ B^T and A^T @ B against the plain kernel
    Rng rng(7);
    Tensor x = random_tensor(4, 5, rng);
    Tensor y = random_tensor(3, 5, rng);
    Tensor nt;
    mat_mul_nt(x, y, nt); // 4x3
    Tensor yt(5, 3);
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 5; ++c) yt.at(c, r) = y.at(r, c);
    Tensor ref;
    mat_mul(x, yt, ref);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(nt[i] == doctest::Approx(ref[i]).epsilon(1e-12));

    Tensor z = random_tensor(4, 6, rng);
    Tensor tn;
    mat_mul_tn(x, z, tn); // 5x6 = x^T @ z
    Tensor xt(5, 4);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 5; ++c) xt.at(c, r) = x.at(r, c);
    Tensor ref2;
    mat_mul(xt, z, ref2);
    for (std::size_t i = 0; i < ref2.size(); ++i) CHECK(tn[i] == doctest::Approx(ref2[i]).epsilon(1e-12));

    CHECK_THROWS_AS(mat_mul(a, a, out), ShapeError);
    CHECK_THROWS_AS(Tensor(2, 2, {1.0}), ShapeError);
    CHECK_THROWS_AS(Tensor(2, 2).item(), ShapeError);
}

TEST_CASE("rng streams are deterministic and independent") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    CHECK(Rng::derive(1, "data", 0) != Rng::derive(1, "data", 1));
    CHECK(Rng::derive(1, "data", 0) != Rng::derive(1, "init", 0));
    CHECK(Rng::derive(1, "data", 3) == Rng::derive(1, "data", 3));
    CHECK(Rng::derive(1, "data", 3) != Rng::derive(2, "data", 3));

    Rng c(123);
    double mean = 0.0, m2 = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double v = c.normal();
        mean += v;
        m2 += v * v;
    }
    mean /= n;
    m2 = m2 / n - mean * mean;
    CHECK(std::fabs(mean) < 0.03);
    CHECK(std::fabs(m2 - 1.0) < 0.05);

    Rng d(9);
    for (int i = 0; i < 1000; ++i) {
        const long v = d.uniform_int(-3, 5);
        CHECK(v >= -3);
        CHECK(v <= 5);
    }
}

TEST_CASE("smooth_l1 oracle values") {
    CHECK(smooth_l1({0, 0, 0}) == 0.0);
    CHECK(smooth_l1({2.0}) == 1.5);
    CHECK(smooth_l1({0.3, 0.4}) == doctest::Approx(0.245).epsilon(1e-15));
    CHECK_THROWS_AS(smooth_l1({}), ShapeError);
    CHECK_THROWS_AS(smooth_l1({std::nan("")}), NumericError);

    // continuous value and slope at the branch point s = 1
    const double below = smooth_l1({1.0 - 1e-7});
    const double above = smooth_l1({1.0 + 1e-7});
    CHECK(std::fabs(above - below - 2e-7) < 1e-12); // slope ~1 on both sides
    CHECK(smooth_l1({1.0}) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("tape backward on composed ops matches hand derivative") {
    Tensor x = Tensor::row({1.0, -2.0, 3.0});
    Tape t;
    Tape::Id xi = t.param(x);
    // loss = sum( tanh(x) * x )
    Tape::Id loss = t.sum_all(t.mul(t.tanh_(xi), xi));
    t.backward(loss);
    const Tensor& g = t.grad(xi);
    for (std::size_t i = 0; i < 3; ++i) {
        const double v = x[i];
        const double th = std::tanh(v);
        const double expect = th + v * (1.0 - th * th);
        CHECK(g[i] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("untouched parameters get exact zero gradients") {
    Tensor a = Tensor::row({1, 2});
    Tensor b = Tensor::row({3, 4});
    Tape t;
    Tape::Id ai = t.param(a);
    Tape::Id bi = t.param(b); // never used in the loss
    Tape::Id loss = t.sum_all(ai);
    t.backward(loss);
    const Tensor& gb = t.grad(bi);
    CHECK(gb.rows() == 1);
    CHECK(gb.cols() == 2);
    CHECK(gb[0] == 0.0);
    CHECK(gb[1] == 0.0);
    CHECK(t.grad(ai)[0] == 1.0);
}

TEST_CASE("tape guards") {
    Tape t;
    Tensor a = Tensor::row({1, 2});
    Tape::Id ai = t.param(a);
    CHECK_THROWS_AS(t.grad(ai), ConfigError);           // before backward
    CHECK_THROWS_AS(t.backward(ai), ShapeError);        // non-scalar loss
    Tape t2;
    Tape::Id b = t2.param(a);
    Tape::Id l = t2.sum_all(b);
    t2.backward(l);
    CHECK_THROWS_AS(t2.backward(l), ConfigError);       // backward is one-shot
    Tape t3;
    Tensor z = Tensor::scalar(-1.0);
    Tape::Id zi = t3.param(z);
    // log of clamped negative is finite; gradient on the clamped branch is 0
    Tape::Id lf = t3.log_floor(zi, 1e-12);
    t3.backward(lf);
    CHECK(t3.grad(zi)[0] == 0.0);
    CHECK(t3.val(lf)[0] == doctest::Approx(std::log(1e-12)));
}

TEST_CASE("gradcheck passes on every primitive") {
    Rng rng(2026);
    // Each case: name, closure over 1+ inputs, inputs
    struct Case {
        const char* name;
        TapeLoss f;
        std::vector<Tensor> inputs;
    };
    std::vector<Case> cases;
    auto reduce = [](Tape& t, Tape::Id x) { // weighted sum to make grads non-uniform
        const Tensor& v = t.val(x);
        Tensor w(v.rows(), v.cols());
        for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.1 * double(i + 1);
        return t.sum_all(t.mul(x, t.constant(std::move(w))));
    };

    cases.push_back({"add", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.add(in[0], in[1])); },
        {random_tensor(3, 4, rng), random_tensor(3, 4, rng)}});
    cases.push_back({"sub", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.sub(in[0], in[1])); },
        {random_tensor(3, 4, rng), random_tensor(3, 4, rng)}});
    cases.push_back({"mul", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.mul(in[0], in[1])); },
        {random_tensor(3, 4, rng), random_tensor(3, 4, rng)}});
    cases.push_back({"div", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.div(in[0], in[1])); },
        {random_tensor(2, 3, rng), Tensor(2, 3, {1.5, 2.0, -1.7, 2.2, 3.0, -2.5})}});
    cases.push_back({"scale+add_const", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.add_const(t.scale(in[0], -1.7), 0.3)); },
        {random_tensor(3, 3, rng)}});
    cases.push_back({"add_scalar", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.add_scalar(in[0], in[1], 2.5)); },
        {random_tensor(3, 3, rng), Tensor::scalar(0.7)}});
    cases.push_back({"tanh", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.tanh_(in[0])); }, {random_tensor(3, 4, rng)}});
    cases.push_back({"sigmoid", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.sigmoid_(in[0])); }, {random_tensor(3, 4, rng)}});
    cases.push_back({"gelu", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.gelu(in[0])); }, {random_tensor(3, 4, rng)}});
    cases.push_back({"softplus", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.softplus(in[0])); }, {random_tensor(3, 4, rng)}});
    cases.push_back({"relu", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.relu(in[0])); },
        {Tensor(2, 2, {0.5, -0.7, 1.2, -2.0})}}); // keep away from the kink
    cases.push_back({"abs", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.abs_(in[0])); },
        {Tensor(2, 2, {0.5, -0.7, 1.2, -2.0})}});
    cases.push_back({"log_floor", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.log_floor(in[0])); },
        {Tensor(2, 2, {0.5, 0.9, 1.2, 2.0})}});
    cases.push_back({"matmul", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.matmul(in[0], in[1])); },
        {random_tensor(3, 4, rng), random_tensor(4, 2, rng)}});
    cases.push_back({"matmul_nt", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.matmul_nt(in[0], in[1])); },
        {random_tensor(3, 4, rng), random_tensor(5, 4, rng)}});
    cases.push_back({"add_row", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.add_row(in[0], in[1])); },
        {random_tensor(3, 4, rng), random_tensor(1, 4, rng)}});
    cases.push_back({"concat+slice", [&](Tape& t, const std::vector<Tape::Id>& in) {
        Tape::Id cat = t.concat_rows({in[0], in[1]});
        Tape::Id cols = t.concat_cols({t.slice_rows(cat, 1, 3), t.slice_rows(cat, 2, 4)});
        return reduce(t, t.slice_cols(cols, 1, 5)); },
        {random_tensor(2, 3, rng), random_tensor(2, 3, rng)}});
    cases.push_back({"reshape", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.reshape(in[0], 2, 6)); }, {random_tensor(3, 4, rng)}});
    cases.push_back({"mean_rows", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.mean_rows(in[0])); }, {random_tensor(5, 4, rng)}});
    cases.push_back({"softmax_rows", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.softmax_rows(in[0])); }, {random_tensor(3, 5, rng)}});
    cases.push_back({"layer_norm_rows", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return reduce(t, t.layer_norm_rows(in[0], in[1], in[2])); },
        {random_tensor(3, 6, rng), random_tensor(1, 6, rng), random_tensor(1, 6, rng)}});
    cases.push_back({"smooth_l1_norm below", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return t.smooth_l1_norm(in[0]); },
        {Tensor::row({0.1, -0.2, 0.15})}}); // s = 0.45 < 1
    cases.push_back({"smooth_l1_norm above", [&](Tape& t, const std::vector<Tape::Id>& in) {
        return t.smooth_l1_norm(in[0]); },
        {Tensor::row({1.1, -0.7, 0.4})}}); // s = 2.2 >= 1

    for (auto& c : cases) {
        CAPTURE(c.name);
        const GradCheckReport rep = grad_check(c.f, c.inputs, 1e-6);
        CHECK_MESSAGE(rep.max_rel_err < 1e-5, c.name, " rel err ", rep.max_rel_err);
    }
}

TEST_CASE("gradcheck on 100 random points per smooth primitive") {
    Rng rng(5);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Tensor> inputs{random_tensor(2, 3, rng), random_tensor(2, 3, rng)};
        TapeLoss f = [](Tape& t, const std::vector<Tape::Id>& in) {
            Tape::Id y = t.gelu(t.mul(in[0], t.sigmoid_(in[1])));
            return t.sum_all(t.mul(y, y));
        };
        worst = std::max(worst, grad_check(f, inputs, 1e-6).max_rel_err);
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("lstm_step examples") {
    const std::size_t d = 4;
    Tensor wx(d, 4 * d), wh(d, 4 * d), b(1, 4 * d);
    Tape t;
    LstmB p{t.param(wx), t.param(wh), t.param(b)};
    Tape::Id x = t.constant(Tensor(1, d));
    Tape::Id h = t.constant(Tensor(1, d));
    Tape::Id c = t.constant(Tensor(1, d));
    auto [h2, c2] = lstm_step(t, x, h, c, p);
    for (std::size_t i = 0; i < d; ++i) {
        CHECK(t.val(h2)[i] == 0.0);
        CHECK(t.val(c2)[i] == 0.0);
    }

    // forget-gate bias +20 keeps c within 1e-8
    Tensor b2(1, 4 * d);
    for (std::size_t i = d; i < 2 * d; ++i) b2[i] = 20.0;
    Tensor ones = Tensor::full(1, d, 1.0);
    Tape t2;
    LstmB p2{t2.param(wx), t2.param(wh), t2.param(b2)};
    auto [h3, c3] = lstm_step(t2, t2.constant(Tensor(1, d)), t2.constant(Tensor(1, d)),
                              t2.constant(ones), p2);
    for (std::size_t i = 0; i < d; ++i) CHECK(std::fabs(t2.val(c3)[i] - 1.0) < 1e-8);

    // determinism: identical inputs twice -> bit-identical
    Rng rng(3);
    Tensor rwx = random_tensor(d, 4 * d, rng), rwh = random_tensor(d, 4 * d, rng),
           rb = random_tensor(1, 4 * d, rng), rx = random_tensor(1, d, rng),
           rh = random_tensor(1, d, rng), rc = random_tensor(1, d, rng);
    auto run = [&]() {
        Tape tt;
        LstmB pp{tt.param(rwx), tt.param(rwh), tt.param(rb)};
        auto [hh, cc] = lstm_step(tt, tt.param(rx), tt.param(rh), tt.param(rc), pp);
        return std::pair{tt.val(hh), tt.val(cc)};
    };
    auto r1 = run(), r2 = run();
    CHECK(r1.first == r2.first);
    CHECK(r1.second == r2.second);
}

TEST_CASE("lstm and gru gradcheck") {
    Rng rng(11);
    const std::size_t d = 4;
    {
        std::vector<Tensor> inputs{random_tensor(d, 4 * d, rng, 0.5), random_tensor(d, 4 * d, rng, 0.5),
                                   random_tensor(1, 4 * d, rng, 0.5), random_tensor(1, d, rng),
                                   random_tensor(1, d, rng), random_tensor(1, d, rng)};
        TapeLoss f = [&](Tape& t, const std::vector<Tape::Id>& in) {
            LstmB p{in[0], in[1], in[2]};
            auto [h2, c2] = lstm_step(t, in[3], in[4], in[5], p);
            return t.sum_all(t.add(t.mul(h2, h2), c2));
        };
        CHECK(grad_check(f, inputs, 1e-6).max_rel_err < 1e-5);
    }
    {
        std::vector<Tensor> inputs{random_tensor(d, 3 * d, rng, 0.5), random_tensor(d, 3 * d, rng, 0.5),
                                   random_tensor(1, 3 * d, rng, 0.5), random_tensor(1, d, rng),
                                   random_tensor(1, d, rng)};
        TapeLoss f = [&](Tape& t, const std::vector<Tape::Id>& in) {
            GruB p{in[0], in[1], in[2]};
            Tape::Id h2 = gru_step(t, in[3], in[4], p);
            return t.sum_all(t.mul(h2, h2));
        };
        CHECK(grad_check(f, inputs, 1e-6).max_rel_err < 1e-5);
    }
}

TEST_CASE("self_attention contracts") {
    Rng rng(17);
    const std::size_t d = 8;
    const int heads = 2;
    auto mk_attn = [&](Tape& t, std::vector<Tensor>& owned) -> AttnB {
        owned.push_back(random_tensor(d, d, rng, 0.4)); // q.w
        owned.push_back(random_tensor(1, d, rng, 0.1)); // q.b
        owned.push_back(random_tensor(d, d, rng, 0.4));
        owned.push_back(random_tensor(1, d, rng, 0.1));
        owned.push_back(random_tensor(d, d, rng, 0.4));
        owned.push_back(random_tensor(1, d, rng, 0.1));
        owned.push_back(random_tensor(d, d, rng, 0.4));
        owned.push_back(random_tensor(1, d, rng, 0.1));
        owned.push_back(Tensor::full(1, d, 1.0)); // ln gamma
        owned.push_back(Tensor(1, d));            // ln beta
        AttnB p;
        p.q = {t.param(owned[0]), t.param(owned[1])};
        p.k = {t.param(owned[2]), t.param(owned[3])};
        p.v = {t.param(owned[4]), t.param(owned[5])};
        p.o = {t.param(owned[6]), t.param(owned[7])};
        p.ln_g = t.param(owned[8]);
        p.ln_b = t.param(owned[9]);
        return p;
    };

    SUBCASE("len 1 attention weight is exactly 1") {
        Tape t;
        std::vector<Tensor> owned;
        AttnB p = mk_attn(t, owned);
        Tensor x = random_tensor(1, d, rng);
        std::vector<Tensor> attn;
        self_attention(t, t.param(x), p, heads, &attn);
        REQUIRE(attn.size() == std::size_t(heads));
        for (const Tensor& a : attn) {
            CHECK(a.rows() == 1);
            CHECK(a.cols() == 1);
            CHECK(a[0] == 1.0);
        }
    }

    SUBCASE("attention rows sum to 1 for lengths 1..32") {
        for (std::size_t len : {1, 2, 3, 7, 16, 32}) {
            Tape t;
            std::vector<Tensor> owned;
            AttnB p = mk_attn(t, owned);
            Tensor x = random_tensor(len, d, rng);
            std::vector<Tensor> attn;
            self_attention(t, t.param(x), p, heads, &attn);
            for (const Tensor& a : attn)
                for (std::size_t r = 0; r < a.rows(); ++r) {
                    double s = 0.0;
                    for (std::size_t cidx = 0; cidx < a.cols(); ++cidx) s += a.at(r, cidx);
                    CHECK(std::fabs(s - 1.0) < 1e-6);
                }
        }
    }

    SUBCASE("two identical rows produce identical outputs") {
        Tape t;
        std::vector<Tensor> owned;
        AttnB p = mk_attn(t, owned);
        Tensor x(2, d);
        Tensor rowv = random_tensor(1, d, rng);
        for (std::size_t c = 0; c < d; ++c) { x.at(0, c) = rowv[c]; x.at(1, c) = rowv[c]; }
        Tape::Id y = self_attention(t, t.param(x), p, heads);
        for (std::size_t c = 0; c < d; ++c)
            CHECK(t.val(y).at(0, c) == doctest::Approx(t.val(y).at(1, c)).epsilon(1e-14));
    }

    SUBCASE("zero weights give exact identity (pre-norm residual)") {
        Tape t;
        AttnB p;
        Tensor zw(d, d), zb(1, d), g = Tensor::full(1, d, 1.0), be(1, d);
        p.q = {t.param(zw), t.param(zb)};
        p.k = {t.param(zw), t.param(zb)};
        p.v = {t.param(zw), t.param(zb)};
        p.o = {t.param(zw), t.param(zb)};
        p.ln_g = t.param(g);
        p.ln_b = t.param(be);
        Rng r2(5);
        Tensor x = random_tensor(3, d, r2);
        Tape::Id y = self_attention(t, t.param(x), p, heads);
        CHECK(t.val(y) == x);
    }

    SUBCASE("gradcheck d=8 2 heads rel err < 1e-5") {
        std::vector<Tensor> inputs;
        inputs.push_back(random_tensor(3, d, rng));       // x
        for (int i = 0; i < 4; ++i) {
            inputs.push_back(random_tensor(d, d, rng, 0.4));
            inputs.push_back(random_tensor(1, d, rng, 0.1));
        }
        inputs.push_back(Tensor::full(1, d, 1.0));
        inputs.push_back(random_tensor(1, d, rng, 0.1));
        TapeLoss f = [&](Tape& t, const std::vector<Tape::Id>& in) {
            AttnB p;
            p.q = {in[1], in[2]};
            p.k = {in[3], in[4]};
            p.v = {in[5], in[6]};
            p.o = {in[7], in[8]};
            p.ln_g = in[9];
            p.ln_b = in[10];
            Tape::Id y = self_attention(t, in[0], p, heads);
            return t.sum_all(t.mul(y, y));
        };
        CHECK(grad_check(f, inputs, 1e-6).max_rel_err < 1e-5);
    }

    SUBCASE("head-count divisibility enforced") {
        Tape t;
        std::vector<Tensor> owned;
        AttnB p = mk_attn(t, owned);
        Tensor x = random_tensor(2, d, rng);
        CHECK_THROWS_AS(self_attention(t, t.param(x), p, 3), ConfigError);
    }
}

TEST_CASE("feed_forward contracts") {
    Rng rng(23);
    const std::size_t d = 8;
    SUBCASE("zero inner weights give exact identity (pre-norm residual)") {
        Tape t;
        FeedForwardB p;
        Tensor w1(d, 4 * d), b1(1, 4 * d), w2(4 * d, d), b2(1, d);
        Tensor g = Tensor::full(1, d, 1.0), be(1, d);
        p.inner = {t.param(w1), t.param(b1)};
        p.outer = {t.param(w2), t.param(b2)};
        p.ln_g = t.param(g);
        p.ln_b = t.param(be);
        Tensor x = random_tensor(5, d, rng);
        Tape::Id y = feed_forward(t, t.param(x), p, Activation::Gelu);
        CHECK(t.val(y) == x);
        CHECK(t.val(y).rows() == 5);
        CHECK(t.val(y).cols() == d);
    }
    SUBCASE("gradcheck rel err < 1e-5") {
        std::vector<Tensor> inputs{random_tensor(3, d, rng),
                                   random_tensor(d, 4 * d, rng, 0.3), random_tensor(1, 4 * d, rng, 0.1),
                                   random_tensor(4 * d, d, rng, 0.3), random_tensor(1, d, rng, 0.1),
                                   Tensor::full(1, d, 1.0), random_tensor(1, d, rng, 0.1)};
        TapeLoss f = [&](Tape& t, const std::vector<Tape::Id>& in) {
            FeedForwardB p;
            p.inner = {in[1], in[2]};
            p.outer = {in[3], in[4]};
            p.ln_g = in[5];
            p.ln_b = in[6];
            return t.sum_all(t.mul(feed_forward(t, in[0], p, Activation::Gelu),
                                   feed_forward(t, in[0], p, Activation::Gelu)));
        };
        CHECK(grad_check(f, inputs, 1e-6).max_rel_err < 1e-5);
    }
}

TEST_CASE("adam update") {
    ParamStore store;
    store.add("w", Tensor::row({1.0, -2.0, 3.0}));
    Adam opt;
    opt.init(store);

    SUBCASE("zero gradient leaves parameters unchanged") {
        std::vector<Tensor> g = store.zeros_like();
        opt.step(store, g);
        CHECK(store.get("w") == Tensor::row({1.0, -2.0, 3.0}));
    }

    SUBCASE("first step magnitude is about lr per element") {
        std::vector<Tensor> g = store.zeros_like();
        g[0] = Tensor::row({0.5, -0.25, 4.0});
        opt.step(store, g);
        const Tensor& w = store.get("w");
        CHECK(w[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
        CHECK(w[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-6));
        CHECK(w[2] == doctest::Approx(3.0 - 1e-3).epsilon(1e-6));
    }

    SUBCASE("deterministic across runs") {
        ParamStore s2;
        s2.add("w", Tensor::row({1.0, -2.0, 3.0}));
        Adam o2;
        o2.init(s2);
        std::vector<Tensor> g = store.zeros_like();
        Rng rng(77);
        for (int it = 0; it < 25; ++it) {
            for (std::size_t i = 0; i < 3; ++i) g[0][i] = rng.normal();
            opt.step(store, g);
            o2.step(s2, g);
        }
        CHECK(store.get("w") == s2.get("w"));
        CHECK(opt.step_count == 25);
    }

    SUBCASE("shape mismatch rejected") {
        std::vector<Tensor> g{Tensor(2, 2)};
        CHECK_THROWS_AS(opt.step(store, g), ShapeError);
    }
}

TEST_CASE("numeric errors carry the producing op") {
    Tape t;
    Tensor big = Tensor::row({1e308});
    Tape::Id a = t.param(big);
    CHECK_THROWS_WITH_AS(t.scale(a, 10.0), doctest::Contains("scale"), NumericError);
    Tape t2;
    Tape::Id b = t2.param(big);
    Tape::Id c = t2.constant(Tensor::row({1e300}));
    CHECK_THROWS_WITH_AS(t2.mul(b, c), doctest::Contains("mul"), NumericError);
}
