#include "sparselr/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sparselr/error.hpp"
#include "sparselr/kernels.hpp"

namespace sparselr {

namespace {

using ColMatrix = Eigen::MatrixXcd;

double largest_abs_eigenvalue(const ColMatrix& h) {
    Eigen::SelfAdjointEigenSolver<ColMatrix> es(h, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw Error("eigenvalue iteration failed");
    }
    const auto& e = es.eigenvalues();
    return std::max(std::abs(e(0)), std::abs(e(e.size() - 1)));
}

}  // namespace

double max_entry_norm(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    return max_entry_norm(m - m.adjoint()) <= tol;
}

double spectral_norm(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("operator_norm requires a square matrix");
    }
    if (m.size() == 0) return 0.0;
    const double scale = max_entry_norm(m);
    if (scale == 0.0) return 0.0;

    // Normal fast paths: Hermitian or anti-Hermitian input (commutators and
    // double commutators of observables) only need eigenvalues.
    const double tol = 1e-14 * scale;
    const Matrix adj = m.adjoint();
    if (max_entry_norm(m - adj) <= tol) {
        return largest_abs_eigenvalue(ColMatrix(0.5 * (m + adj)));
    }
    if (max_entry_norm(m + adj) <= tol) {
        return largest_abs_eigenvalue(ColMatrix(cplx(0.0, 0.5) * (m - adj)));
    }
    Eigen::BDCSVD<ColMatrix> svd(ColMatrix(m), 0);
    return svd.singularValues()(0);
}

SpectralDecomposition hermitian_eigensystem(const Matrix& h) {
    if (h.rows() != h.cols()) {
        throw DimensionError("hermitian_spectral requires a square matrix");
    }
    if (!is_hermitian(h)) {
        throw PreconditionError("hermitian_spectral: input is not Hermitian within 1e-12");
    }
    const ColMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<ColMatrix> es(sym);
    if (es.info() != Eigen::Success) {
        throw Error("eigendecomposition failed");
    }
    return {es.eigenvalues(), es.eigenvectors()};
}

double reconstruction_residual(const SpectralDecomposition& s, const Matrix& h) {
    const Matrix& u = s.eigenvectors;
    const Matrix rebuilt = u * s.eigenvalues.cast<cplx>().asDiagonal() * u.adjoint();
    const double diff = (rebuilt - h).norm();
    const double ref = h.norm();
    return ref > 0.0 ? diff / ref : diff;
}

Matrix commutator(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw DimensionError("commutator: operands have mismatched dimensions");
    }
    return kernels::parallel::multiply(a, b) - kernels::parallel::multiply(b, a);
}

}  // namespace sparselr
