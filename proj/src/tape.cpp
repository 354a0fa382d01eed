#include "itpnet/tape.hpp"

#include <cmath>
#include <cstring>

namespace itpnet {

namespace {

constexpr double kLnEps = 1e-5;           // layer norm variance epsilon
constexpr double kInvSqrt2 = 0.7071067811865476;
constexpr double kInvSqrt2Pi = 0.3989422804014327;

void check_finite(const Tensor& t, const char* op) {
    if (!t.all_finite())
        throw NumericError(std::string("non-finite value produced by op '") + op + "'");
}

} // namespace

Tape::Id Tape::push(Tensor value, std::function<void(Tape&, Id)> back, const char* op) {
    check_finite(value, op);
    nodes_.push_back(Node{std::move(value), nullptr, std::move(back)});
    return Id(nodes_.size() - 1);
}

Tape::Id Tape::param(const Tensor& t) {
    check_finite(t, "param");
    nodes_.push_back(Node{Tensor(), &t, nullptr});
    return Id(nodes_.size() - 1);
}

Tape::Id Tape::constant(Tensor t) {
    check_finite(t, "constant");
    nodes_.push_back(Node{std::move(t), nullptr, nullptr});
    return Id(nodes_.size() - 1);
}

Tensor& Tape::grad_mut(Id id) {
    Tensor& g = grads_[std::size_t(id)];
    if (g.empty()) {
        const Tensor& v = val(id);
        g = Tensor(v.rows(), v.cols());
    }
    return g;
}

const Tensor& Tape::grad(Id id) const {
    if (!ran_backward_)
        throw ConfigError("Tape::grad called before backward()");
    if (grads_[std::size_t(id)].empty()) {
        // untouched node: exact zero gradient of the right shape
        const_cast<Tape*>(this)->grad_mut(id);
    }
    return grads_[std::size_t(id)];
}

void Tape::backward(Id loss) {
    if (ran_backward_)
        throw ConfigError("Tape::backward may run only once per tape");
    if (val(loss).size() != 1)
        throw ShapeError("Tape::backward requires a scalar loss node");
    ran_backward_ = true;
    grads_.assign(nodes_.size(), Tensor());
    touched_.assign(nodes_.size(), 0);
    grad_mut(loss)[0] = 1.0;
    bump(loss);
    for (Id id = Id(nodes_.size()) - 1; id >= 0; --id) {
        if (!touched_[std::size_t(id)]) continue;
        if (nodes_[std::size_t(id)].back)
            nodes_[std::size_t(id)].back(*this, id);
    }
}

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

Tape::Id Tape::add(Id a, Id b) {
    const Tensor &va = val(a), &vb = val(b);
    if (!va.same_shape(vb)) throw ShapeError("add: shape mismatch");
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += vb[i];
    return push(std::move(out), [a, b](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        Tensor& gb = t.grad_mut(b);
        for (std::size_t i = 0; i < g.size(); ++i) { ga[i] += g[i]; gb[i] += g[i]; }
        t.bump(a); t.bump(b);
    }, "add");
}

Tape::Id Tape::sub(Id a, Id b) {
    const Tensor &va = val(a), &vb = val(b);
    if (!va.same_shape(vb)) throw ShapeError("sub: shape mismatch");
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= vb[i];
    return push(std::move(out), [a, b](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        Tensor& gb = t.grad_mut(b);
        for (std::size_t i = 0; i < g.size(); ++i) { ga[i] += g[i]; gb[i] -= g[i]; }
        t.bump(a); t.bump(b);
    }, "sub");
}

Tape::Id Tape::mul(Id a, Id b) {
    const Tensor &va = val(a), &vb = val(b);
    if (!va.same_shape(vb)) throw ShapeError("mul: shape mismatch");
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= vb[i];
    return push(std::move(out), [a, b](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor &va = t.val(a), &vb = t.val(b);
        Tensor& ga = t.grad_mut(a);
        Tensor& gb = t.grad_mut(b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] * vb[i];
            gb[i] += g[i] * va[i];
        }
        t.bump(a); t.bump(b);
    }, "mul");
}

Tape::Id Tape::div(Id a, Id b) {
    const Tensor &va = val(a), &vb = val(b);
    if (!va.same_shape(vb)) throw ShapeError("div: shape mismatch");
    Tensor out = va;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] /= vb[i];
    return push(std::move(out), [a, b](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor &va = t.val(a), &vb = t.val(b);
        Tensor& ga = t.grad_mut(a);
        Tensor& gb = t.grad_mut(b);
        for (std::size_t i = 0; i < g.size(); ++i) {
            ga[i] += g[i] / vb[i];
            gb[i] -= g[i] * va[i] / (vb[i] * vb[i]);
        }
        t.bump(a); t.bump(b);
    }, "div");
}

Tape::Id Tape::scale(Id a, double c) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
    return push(std::move(out), [a, c](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
        t.bump(a);
    }, "scale");
}

Tape::Id Tape::add_const(Id a, double c) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        t.bump(a);
    }, "add_const");
}

Tape::Id Tape::add_scalar(Id x, Id s, double c) {
    const Tensor& vs = val(s);
    if (vs.size() != 1) throw ShapeError("add_scalar: s must be 1x1");
    Tensor out = val(x);
    const double sv = c * vs[0];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += sv;
    return push(std::move(out), [x, s, c](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& gx = t.grad_mut(x);
        Tensor& gs = t.grad_mut(s);
        double acc = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) { gx[i] += g[i]; acc += g[i]; }
        gs[0] += c * acc;
        t.bump(x); t.bump(s);
    }, "add_scalar");
}

Tape::Id Tape::tanh_(Id a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(out[i]);
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& y = t.val(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
        t.bump(a);
    }, "tanh");
}

Tape::Id Tape::sigmoid_(Id a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 1.0 / (1.0 + std::exp(-out[i]));
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& y = t.val(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
        t.bump(a);
    }, "sigmoid");
}

Tape::Id Tape::gelu(Id a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = out[i];
        out[i] = 0.5 * x * (1.0 + std::erf(x * kInvSqrt2));
    }
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double xi = x[i];
            const double cdf = 0.5 * (1.0 + std::erf(xi * kInvSqrt2));
            const double pdf = kInvSqrt2Pi * std::exp(-0.5 * xi * xi);
            ga[i] += g[i] * (cdf + xi * pdf);
        }
        t.bump(a);
    }, "gelu");
}

Tape::Id Tape::relu(Id a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (x[i] > 0.0) ga[i] += g[i];
        t.bump(a);
    }, "relu");
}

Tape::Id Tape::softplus(Id a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = out[i];
        out[i] = x > 30.0 ? x : std::log1p(std::exp(x));
    }
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i)
            ga[i] += g[i] / (1.0 + std::exp(-x[i]));
        t.bump(a);
    }, "softplus");
}

Tape::Id Tape::abs_(Id a) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::fabs(out[i]);
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double s = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
            ga[i] += g[i] * s;
        }
        t.bump(a);
    }, "abs");
}

Tape::Id Tape::log_floor(Id a, double floor) {
    Tensor out = val(a);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::log(out[i] > floor ? out[i] : floor);
    return push(std::move(out), [a, floor](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i)
            if (x[i] > floor) ga[i] += g[i] / x[i];
        t.bump(a);
    }, "log_floor");
}

// ---------------------------------------------------------------------------
// matrix
// ---------------------------------------------------------------------------

Tape::Id Tape::matmul(Id a, Id b) {
    Tensor out;
    mat_mul(val(a), val(b), out);
    return push(std::move(out), [a, b](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        mat_mul_nt(g, t.val(b), t.grad_mut(a), true); // dA = dC @ B^T
        mat_mul_tn(t.val(a), g, t.grad_mut(b), true); // dB = A^T @ dC
        t.bump(a); t.bump(b);
    }, "matmul");
}

Tape::Id Tape::matmul_nt(Id a, Id b) {
    Tensor out;
    mat_mul_nt(val(a), val(b), out);
    return push(std::move(out), [a, b](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        mat_mul(g, t.val(b), t.grad_mut(a), true);    // dA = dC @ B
        mat_mul_tn(g, t.val(a), t.grad_mut(b), true); // dB = dC^T @ A
        t.bump(a); t.bump(b);
    }, "matmul_nt");
}

Tape::Id Tape::add_row(Id x, Id bias) {
    const Tensor &vx = val(x), &vb = val(bias);
    if (vb.rows() != 1 || vb.cols() != vx.cols())
        throw ShapeError("add_row: bias must be 1 x cols(x)");
    Tensor out = vx;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        double* row = out.row_ptr(r);
        for (std::size_t c = 0; c < out.cols(); ++c) row[c] += vb[c];
    }
    return push(std::move(out), [x, bias](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& gx = t.grad_mut(x);
        Tensor& gb = t.grad_mut(bias);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double* grow = g.row_ptr(r);
            double* xrow = gx.row_ptr(r);
            for (std::size_t c = 0; c < g.cols(); ++c) {
                xrow[c] += grow[c];
                gb[c] += grow[c];
            }
        }
        t.bump(x); t.bump(bias);
    }, "add_row");
}

// ---------------------------------------------------------------------------
// structure
// ---------------------------------------------------------------------------

Tape::Id Tape::concat_rows(const std::vector<Id>& parts) {
    if (parts.empty()) throw ShapeError("concat_rows: no parts");
    const std::size_t cols = val(parts[0]).cols();
    std::size_t rows = 0;
    for (Id p : parts) {
        if (val(p).cols() != cols) throw ShapeError("concat_rows: column mismatch");
        rows += val(p).rows();
    }
    Tensor out(rows, cols);
    std::size_t r = 0;
    for (Id p : parts) {
        const Tensor& v = val(p);
        std::memcpy(out.row_ptr(r), v.data(), v.size() * sizeof(double));
        r += v.rows();
    }
    return push(std::move(out), [parts](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        std::size_t r = 0;
        for (Id p : parts) {
            Tensor& gp = t.grad_mut(p);
            for (std::size_t i = 0; i < gp.size(); ++i)
                gp[i] += g.row_ptr(r)[i];
            r += gp.rows();
            t.bump(p);
        }
    }, "concat_rows");
}

Tape::Id Tape::slice_rows(Id a, std::size_t r0, std::size_t r1) {
    const Tensor& v = val(a);
    if (r0 >= r1 || r1 > v.rows()) throw ShapeError("slice_rows: bad range");
    Tensor out(r1 - r0, v.cols());
    std::memcpy(out.data(), v.row_ptr(r0), out.size() * sizeof(double));
    return push(std::move(out), [a, r0](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        double* base = ga.row_ptr(r0);
        for (std::size_t i = 0; i < g.size(); ++i) base[i] += g[i];
        t.bump(a);
    }, "slice_rows");
}

Tape::Id Tape::slice_cols(Id a, std::size_t c0, std::size_t c1) {
    const Tensor& v = val(a);
    if (c0 >= c1 || c1 > v.cols()) throw ShapeError("slice_cols: bad range");
    Tensor out(v.rows(), c1 - c0);
    for (std::size_t r = 0; r < v.rows(); ++r)
        std::memcpy(out.row_ptr(r), v.row_ptr(r) + c0, out.cols() * sizeof(double));
    return push(std::move(out), [a, c0](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            double* dst = ga.row_ptr(r) + c0;
            const double* src = g.row_ptr(r);
            for (std::size_t c = 0; c < g.cols(); ++c) dst[c] += src[c];
        }
        t.bump(a);
    }, "slice_cols");
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
    if (parts.empty()) throw ShapeError("concat_cols: no parts");
    const std::size_t rows = val(parts[0]).rows();
    std::size_t cols = 0;
    for (Id p : parts) {
        if (val(p).rows() != rows) throw ShapeError("concat_cols: row mismatch");
        cols += val(p).cols();
    }
    Tensor out(rows, cols);
    std::size_t c = 0;
    for (Id p : parts) {
        const Tensor& v = val(p);
        for (std::size_t r = 0; r < rows; ++r)
            std::memcpy(out.row_ptr(r) + c, v.row_ptr(r), v.cols() * sizeof(double));
        c += v.cols();
    }
    return push(std::move(out), [parts, rows](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        std::size_t c = 0;
        for (Id p : parts) {
            Tensor& gp = t.grad_mut(p);
            for (std::size_t r = 0; r < rows; ++r) {
                const double* src = g.row_ptr(r) + c;
                double* dst = gp.row_ptr(r);
                for (std::size_t j = 0; j < gp.cols(); ++j) dst[j] += src[j];
            }
            c += gp.cols();
            t.bump(p);
        }
    }, "concat_cols");
}

Tape::Id Tape::reshape(Id a, std::size_t rows, std::size_t cols) {
    const Tensor& v = val(a);
    if (rows * cols != v.size()) throw ShapeError("reshape: element count mismatch");
    Tensor out(rows, cols);
    std::memcpy(out.data(), v.data(), v.size() * sizeof(double));
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
        t.bump(a);
    }, "reshape");
}

// ---------------------------------------------------------------------------
// reductions / normalizations
// ---------------------------------------------------------------------------

Tape::Id Tape::sum_all(Id a) {
    const Tensor& v = val(a);
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += v[i];
    return push(Tensor::scalar(acc), [a](Tape& t, Id self) {
        const double g = t.grad_mut(self)[0];
        Tensor& ga = t.grad_mut(a);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g;
        t.bump(a);
    }, "sum_all");
}

Tape::Id Tape::mean_rows(Id a) {
    const Tensor& v = val(a);
    if (v.rows() == 0) throw ShapeError("mean_rows: empty input");
    Tensor out(1, v.cols());
    for (std::size_t r = 0; r < v.rows(); ++r)
        for (std::size_t c = 0; c < v.cols(); ++c) out[c] += v.at(r, c);
    const double inv = 1.0 / double(v.rows());
    for (std::size_t c = 0; c < v.cols(); ++c) out[c] *= inv;
    return push(std::move(out), [a, inv](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t r = 0; r < ga.rows(); ++r)
            for (std::size_t c = 0; c < ga.cols(); ++c)
                ga.at(r, c) += inv * g[c];
        t.bump(a);
    }, "mean_rows");
}

Tape::Id Tape::softmax_rows(Id a) {
    const Tensor& v = val(a);
    Tensor out = v;
    for (std::size_t r = 0; r < v.rows(); ++r) {
        double* row = out.row_ptr(r);
        double mx = row[0];
        for (std::size_t c = 1; c < v.cols(); ++c) mx = std::max(mx, row[c]);
        double z = 0.0;
        for (std::size_t c = 0; c < v.cols(); ++c) { row[c] = std::exp(row[c] - mx); z += row[c]; }
        const double inv = 1.0 / z;
        for (std::size_t c = 0; c < v.cols(); ++c) row[c] *= inv;
    }
    return push(std::move(out), [a](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& y = t.val(self);
        Tensor& ga = t.grad_mut(a);
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double* grow = g.row_ptr(r);
            const double* yrow = y.row_ptr(r);
            double dot = 0.0;
            for (std::size_t c = 0; c < g.cols(); ++c) dot += grow[c] * yrow[c];
            double* garow = ga.row_ptr(r);
            for (std::size_t c = 0; c < g.cols(); ++c)
                garow[c] += yrow[c] * (grow[c] - dot);
        }
        t.bump(a);
    }, "softmax_rows");
}

Tape::Id Tape::layer_norm_rows(Id x, Id gamma, Id beta) {
    const Tensor& v = val(x);
    const Tensor &vg = val(gamma), &vb = val(beta);
    if (vg.rows() != 1 || vg.cols() != v.cols() || vb.rows() != 1 || vb.cols() != v.cols())
        throw ShapeError("layer_norm_rows: gamma/beta must be 1 x cols(x)");
    const std::size_t d = v.cols();
    Tensor out(v.rows(), d);
    Tensor xhat(v.rows(), d);      // cached for backward via closure copy
    std::vector<double> inv_std(v.rows());
    for (std::size_t r = 0; r < v.rows(); ++r) {
        const double* row = v.row_ptr(r);
        double mean = 0.0;
        for (std::size_t c = 0; c < d; ++c) mean += row[c];
        mean /= double(d);
        double var = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double dx = row[c] - mean;
            var += dx * dx;
        }
        var /= double(d);
        const double is = 1.0 / std::sqrt(var + kLnEps);
        inv_std[r] = is;
        double* xh = xhat.row_ptr(r);
        double* orow = out.row_ptr(r);
        for (std::size_t c = 0; c < d; ++c) {
            xh[c] = (row[c] - mean) * is;
            orow[c] = xh[c] * vg[c] + vb[c];
        }
    }
    return push(std::move(out),
                [x, gamma, beta, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape& t, Id self) {
        const Tensor& g = t.grad_mut(self);
        const Tensor& vg = t.val(gamma);
        Tensor& gx = t.grad_mut(x);
        Tensor& gg = t.grad_mut(gamma);
        Tensor& gb = t.grad_mut(beta);
        const std::size_t d = g.cols();
        for (std::size_t r = 0; r < g.rows(); ++r) {
            const double* grow = g.row_ptr(r);
            const double* xh = xhat.row_ptr(r);
            // h = g * gamma; dx = (h - mean(h) - xhat * mean(h*xhat)) * inv_std
            double mean_h = 0.0, mean_hx = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double h = grow[c] * vg[c];
                mean_h += h;
                mean_hx += h * xh[c];
            }
            mean_h /= double(d);
            mean_hx /= double(d);
            double* gxrow = gx.row_ptr(r);
            for (std::size_t c = 0; c < d; ++c) {
                const double h = grow[c] * vg[c];
                gxrow[c] += (h - mean_h - xh[c] * mean_hx) * inv_std[r];
                gg[c] += grow[c] * xh[c];
                gb[c] += grow[c];
            }
        }
        t.bump(x); t.bump(gamma); t.bump(beta);
    }, "layer_norm_rows");
}

Tape::Id Tape::smooth_l1_norm(Id a) {
    const Tensor& v = val(a);
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::fabs(v[i]);
    const double out = s < 1.0 ? 0.5 * s * s : s - 0.5;
    return push(Tensor::scalar(out), [a, s](Tape& t, Id self) {
        const double g = t.grad_mut(self)[0];
        const Tensor& x = t.val(a);
        Tensor& ga = t.grad_mut(a);
        const double ds = s < 1.0 ? s : 1.0; // branches meet with equal slope at s = 1
        for (std::size_t i = 0; i < ga.size(); ++i) {
            const double sg = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0);
            ga[i] += g * ds * sg;
        }
        t.bump(a);
    }, "smooth_l1_norm");
}

double smooth_l1(const std::vector<double>& v) {
    if (v.empty()) throw ShapeError("smooth_l1: empty input");
    double s = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw NumericError("smooth_l1: non-finite input");
        s += std::fabs(x);
    }
    return s < 1.0 ? 0.5 * s * s : s - 0.5;
}

} // namespace itpnet
