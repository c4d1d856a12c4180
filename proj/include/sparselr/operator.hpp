#pragma once

#include "sparselr/geometry.hpp"
#include "sparselr/linalg.hpp"
#include "sparselr/types.hpp"

namespace sparselr {

/// Element of the local algebra on an interval: a D^|support| square matrix,
/// sites ordered left to right (leftmost site is the most significant digit).
class DenseOperator {
public:
    DenseOperator(SiteSupport support, Matrix matrix, int site_dim);

    const SiteSupport& support() const noexcept { return support_; }
    const Matrix& matrix() const noexcept { return matrix_; }
    int site_dim() const noexcept { return site_dim_; }
    Index dim() const noexcept { return matrix_.rows(); }
    bool is_hermitian(double tol = kHermitianTol) const { return sparselr::is_hermitian(matrix_, tol); }

    static DenseOperator identity(SiteSupport support, int site_dim);
    static DenseOperator zero(SiteSupport support, int site_dim);

private:
    SiteSupport support_;
    Matrix matrix_;
    int site_dim_;
};

/// a on [p,q], b on [q+1,r] -> a (x) b on [p,r].
DenseOperator kron_product(const DenseOperator& a, const DenseOperator& b);

/// a (x) identities on target \ a.support.
DenseOperator embed_local(const DenseOperator& a, const SiteSupport& target, const ChainGeometry& geom);
DenseOperator embed_full(const DenseOperator& a, const ChainGeometry& geom);

double operator_norm(const DenseOperator& a);

/// [a, b]; both operands on the same support.
DenseOperator commutator(const DenseOperator& a, const DenseOperator& b);

SpectralDecomposition hermitian_spectral(const DenseOperator& h);

/// E_X(a) = (id_X (x) prod_{y not in X} rho_y)(a), returned on the full chain.
DenseOperator conditional_expectation(const DenseOperator& a, const SiteSupport& X, const ChainGeometry& geom);

/// max_B ||[a, B]|| / (||a|| ||B||) over the clock-and-shift unitary basis
/// of the algebra on [-L, L] \ X. Averaging over that basis is exactly the
/// normalized trace on the complement, so ||(id - E_X)(a)|| <= eps ||a||.
double local_commutator_epsilon(const DenseOperator& a, const SiteSupport& X, const ChainGeometry& geom);

/// True when the full-chain operator a commutes (to tol) with everything
/// outside `support`, i.e. the declared support is honest.
bool acts_within(const DenseOperator& a, const SiteSupport& support, const ChainGeometry& geom, double tol = 1e-10);

}  // namespace sparselr
