#include "sparselr/kernels.hpp"

#include <algorithm>

namespace sparselr::kernels {

namespace {

// Work below this many output entries is not worth a parallel region.
constexpr Index kParallelThreshold = 4096;

inline cplx phase(double t, double em, double en) {
    return std::polar(1.0, t * (em - en));
}

}  // namespace

namespace serial {

Matrix kron(const Matrix& a, const Matrix& b) {
    const Index na = a.rows(), ma = a.cols(), nb = b.rows(), mb = b.cols();
    Matrix out(na * nb, ma * mb);
    for (Index i = 0; i < na; ++i)
        for (Index k = 0; k < nb; ++k)
            for (Index j = 0; j < ma; ++j)
                for (Index l = 0; l < mb; ++l)
                    out(i * nb + k, j * mb + l) = a(i, j) * b(k, l);
    return out;
}

Matrix pad_identity(const Matrix& a, Index left, Index right) {
    const Index m = a.rows();
    const Index n = left * m * right;
    Matrix out = Matrix::Zero(n, n);
    for (Index l = 0; l < left; ++l)
        for (Index i = 0; i < m; ++i)
            for (Index r = 0; r < right; ++r) {
                const Index row = (l * m + i) * right + r;
                for (Index j = 0; j < m; ++j) out(row, (l * m + j) * right + r) = a(i, j);
            }
    return out;
}

Matrix trace_outer(const Matrix& a, Index left, Index mid, Index right) {
    Matrix out(mid, mid);
    const double norm = 1.0 / static_cast<double>(left * right);
    for (Index mi = 0; mi < mid; ++mi)
        for (Index mj = 0; mj < mid; ++mj) {
            cplx acc{0.0, 0.0};
            for (Index l = 0; l < left; ++l)
                for (Index r = 0; r < right; ++r)
                    acc += a((l * mid + mi) * right + r, (l * mid + mj) * right + r);
            out(mi, mj) = acc * norm;
        }
    return out;
}

void apply_phases(Matrix& a, const RealVector& e, double t) {
    for (Index m = 0; m < a.rows(); ++m)
        for (Index n = 0; n < a.cols(); ++n) a(m, n) *= phase(t, e(m), e(n));
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    out.noalias() = a * b;
    return out;
}

}  // namespace serial

namespace parallel {

Matrix kron(const Matrix& a, const Matrix& b) {
    const Index na = a.rows(), ma = a.cols(), nb = b.rows(), mb = b.cols();
    Matrix out(na * nb, ma * mb);
    const Index rows = na * nb;
#pragma omp parallel for schedule(static) if (out.size() > kParallelThreshold)
    for (Index row = 0; row < rows; ++row) {
        const Index i = row / nb, k = row % nb;
        for (Index j = 0; j < ma; ++j)
            for (Index l = 0; l < mb; ++l) out(row, j * mb + l) = a(i, j) * b(k, l);
    }
    return out;
}

Matrix pad_identity(const Matrix& a, Index left, Index right) {
    const Index m = a.rows();
    const Index n = left * m * right;
    Matrix out = Matrix::Zero(n, n);
#pragma omp parallel for schedule(static) if (out.size() > kParallelThreshold)
    for (Index row = 0; row < n; ++row) {
        const Index r = row % right;
        const Index li = row / right;
        const Index l = li / m, i = li % m;
        for (Index j = 0; j < m; ++j) out(row, (l * m + j) * right + r) = a(i, j);
    }
    return out;
}

Matrix trace_outer(const Matrix& a, Index left, Index mid, Index right) {
    Matrix out(mid, mid);
    const double norm = 1.0 / static_cast<double>(left * right);
#pragma omp parallel for schedule(static) if (a.size() > kParallelThreshold)
    for (Index mi = 0; mi < mid; ++mi)
        for (Index mj = 0; mj < mid; ++mj) {
            cplx acc{0.0, 0.0};
            for (Index l = 0; l < left; ++l)
                for (Index r = 0; r < right; ++r)
                    acc += a((l * mid + mi) * right + r, (l * mid + mj) * right + r);
            out(mi, mj) = acc * norm;
        }
    return out;
}

void apply_phases(Matrix& a, const RealVector& e, double t) {
    const Index rows = a.rows(), cols = a.cols();
#pragma omp parallel for schedule(static) if (a.size() > kParallelThreshold)
    for (Index m = 0; m < rows; ++m)
        for (Index n = 0; n < cols; ++n) a(m, n) *= phase(t, e(m), e(n));
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    const Index panels = (a.rows() + kPanelRows - 1) / kPanelRows;
#pragma omp parallel for schedule(static) if (a.rows() > kPanelRows)
    for (Index p = 0; p < panels; ++p) {
        const Index r0 = p * kPanelRows;
        const Index nr = std::min(kPanelRows, a.rows() - r0);
        out.middleRows(r0, nr).noalias() = a.middleRows(r0, nr) * b;
    }
    return out;
}

}  // namespace parallel

}  // namespace sparselr::kernels
