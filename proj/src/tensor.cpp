#include "itpnet/tensor.hpp"

namespace itpnet {

void mat_mul(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
    if (a.cols() != b.rows())
        throw ShapeError("mat_mul: inner dimensions differ");
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    if (!accumulate) out = Tensor(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        double* out_row = out.row_ptr(i);
        const double* a_row = a.row_ptr(i);
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a_row[p];
            const double* b_row = b.row_ptr(p);
            for (std::size_t j = 0; j < n; ++j)
                out_row[j] += av * b_row[j];
        }
    }
}

void mat_mul_nt(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
    if (a.cols() != b.cols())
        throw ShapeError("mat_mul_nt: inner dimensions differ");
    const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
    if (!accumulate) out = Tensor(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = a.row_ptr(i);
        double* out_row = out.row_ptr(i);
        for (std::size_t j = 0; j < n; ++j) {
            const double* b_row = b.row_ptr(j);
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p)
                acc += a_row[p] * b_row[p];
            out_row[j] += acc;
        }
    }
}

void mat_mul_tn(const Tensor& a, const Tensor& b, Tensor& out, bool accumulate) {
    if (a.rows() != b.rows())
        throw ShapeError("mat_mul_tn: inner dimensions differ");
    const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
    if (!accumulate) out = Tensor(m, n);
    for (std::size_t p = 0; p < k; ++p) {
        const double* a_row = a.row_ptr(p);
        const double* b_row = b.row_ptr(p);
        for (std::size_t i = 0; i < m; ++i) {
            const double av = a_row[i];
            double* out_row = out.row_ptr(i);
            for (std::size_t j = 0; j < n; ++j)
                out_row[j] += av * b_row[j];
        }
    }
}

} // namespace itpnet
