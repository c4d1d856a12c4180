#include "sparselr/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sparselr/error.hpp"
#include "sparselr/kernels.hpp"

namespace sparselr {

DenseOperator::DenseOperator(SiteSupport support, Matrix matrix, int site_dim)
    : support_(support), matrix_(std::move(matrix)), site_dim_(site_dim) {
    if (site_dim_ < 2) {
        throw DomainError("on-site dimension must be >= 2");
    }
    if (matrix_.rows() != matrix_.cols()) {
        throw DimensionError("operator matrix must be square");
    }
    if (matrix_.rows() != int_pow(site_dim_, support_.size())) {
        throw DimensionError("operator on " + support_.str() + " needs dimension " +
                             std::to_string(int_pow(site_dim_, support_.size())) + ", got " +
                             std::to_string(matrix_.rows()));
    }
}

DenseOperator DenseOperator::identity(SiteSupport support, int site_dim) {
    const Index n = int_pow(site_dim, support.size());
    return {support, Matrix::Identity(n, n), site_dim};
}

DenseOperator DenseOperator::zero(SiteSupport support, int site_dim) {
    const Index n = int_pow(site_dim, support.size());
    return {support, Matrix::Zero(n, n), site_dim};
}

DenseOperator kron_product(const DenseOperator& a, const DenseOperator& b) {
    if (a.site_dim() != b.site_dim()) {
        throw DimensionError("kron_product: on-site dimensions differ");
    }
    if (b.support().lo != a.support().hi + 1) {
        throw SupportMismatch("kron_product: supports " + a.support().str() + " and " + b.support().str() +
                              " are not adjacent and ordered");
    }
    return {SiteSupport(a.support().lo, b.support().hi), kernels::parallel::kron(a.matrix(), b.matrix()),
            a.site_dim()};
}

DenseOperator embed_local(const DenseOperator& a, const SiteSupport& target, const ChainGeometry& geom) {
    if (a.site_dim() != geom.D()) {
        throw DimensionError("embed_local: operator dimension does not match geometry");
    }
    geom.require_inside(target, "embed target");
    if (!target.contains(a.support())) {
        throw SupportMismatch("embed_local: " + a.support().str() + " is not contained in " + target.str());
    }
    if (a.support() == target) return a;
    const Index left = geom.dim_of_sites(a.support().lo - target.lo);
    const Index right = geom.dim_of_sites(target.hi - a.support().hi);
    return {target, kernels::parallel::pad_identity(a.matrix(), left, right), geom.D()};
}

DenseOperator embed_full(const DenseOperator& a, const ChainGeometry& geom) {
    return embed_local(a, geom.full(), geom);
}

double operator_norm(const DenseOperator& a) {
    return spectral_norm(a.matrix());
}

DenseOperator commutator(const DenseOperator& a, const DenseOperator& b) {
    if (!(a.support() == b.support())) {
        throw SupportMismatch("commutator: embed both operands on a common support first");
    }
    return {a.support(), commutator(a.matrix(), b.matrix()), a.site_dim()};
}

SpectralDecomposition hermitian_spectral(const DenseOperator& h) {
    return hermitian_eigensystem(h.matrix());
}

DenseOperator conditional_expectation(const DenseOperator& a, const SiteSupport& X, const ChainGeometry& geom) {
    geom.require_inside(X, "conditional expectation");
    if (!(a.support() == geom.full()) || a.site_dim() != geom.D()) {
        throw SupportMismatch("conditional_expectation: operator must live on the full chain");
    }
    const Index left = geom.dim_of_sites(X.lo + geom.L());
    const Index mid = geom.dim_of(X);
    const Index right = geom.dim_of_sites(geom.L() - X.hi);
    const Matrix reduced = kernels::parallel::trace_outer(a.matrix(), left, mid, right);
    return {geom.full(), kernels::parallel::pad_identity(reduced, left, right), geom.D()};
}

namespace {

// Monomial unitary: column j of W is phase[j] * e_{perm[j]}.
struct Monomial {
    std::vector<Index> perm;
    std::vector<cplx> phase;
};

// Clock-and-shift product X^p Z^q on each complement site, identity on X.
// `labels` holds (p, q) per complement site, leftmost first.
Monomial weyl_operator(const ChainGeometry& geom, const SiteSupport& X, const std::vector<int>& labels) {
    const int D = geom.D();
    const int n_sites = geom.num_sites();
    const Index dim = geom.total_dim();
    Monomial w{std::vector<Index>(dim), std::vector<cplx>(dim)};
    const double omega = 2.0 * std::numbers::pi / D;
    std::vector<int> digits(n_sites);
    for (Index col = 0; col < dim; ++col) {
        Index rest = col;
        for (int s = n_sites - 1; s >= 0; --s) {
            digits[s] = static_cast<int>(rest % D);
            rest /= D;
        }
        double angle = 0.0;
        int c = 0;
        for (int s = 0; s < n_sites; ++s) {
            const int site = s - geom.L();
            if (X.contains(site)) continue;
            const int p = labels[2 * c], q = labels[2 * c + 1];
            angle += omega * q * digits[s];
            digits[s] = (digits[s] + p) % D;
            ++c;
        }
        Index row = 0;
        for (int s = 0; s < n_sites; ++s) row = row * D + digits[s];
        w.perm[col] = row;
        w.phase[col] = std::polar(1.0, angle);
    }
    return w;
}

Matrix commutator_with(const Matrix& a, const Monomial& w) {
    const Index n = a.rows();
    Matrix aw(n, n), wa(n, n);
    for (Index j = 0; j < n; ++j) {
        // (aW)_{:,j} = phase_j a_{:,perm_j};  (Wa)_{perm_i,:} = phase_i a_{i,:}
        aw.col(j) = w.phase[j] * a.col(w.perm[j]);
        wa.row(w.perm[j]) = w.phase[j] * a.row(j);
    }
    return aw - wa;
}

}  // namespace

double local_commutator_epsilon(const DenseOperator& a, const SiteSupport& X, const ChainGeometry& geom) {
    geom.require_inside(X, "local_commutator_epsilon");
    if (!(a.support() == geom.full()) || a.site_dim() != geom.D()) {
        throw SupportMismatch("local_commutator_epsilon: operator must live on the full chain");
    }
    const double a_norm = operator_norm(a);
    if (a_norm == 0.0) return 0.0;
    const int complement = geom.num_sites() - X.size();
    if (complement == 0) return 0.0;

    const int D = geom.D();
    const Index count = int_pow(D, 2 * complement);
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (Index k = 0; k < count; ++k) {
        std::vector<int> labels(2 * complement);
        Index rest = k;
        for (int i = 2 * complement - 1; i >= 0; --i) {
            labels[i] = static_cast<int>(rest % D);
            rest /= D;
        }
        const Monomial w = weyl_operator(geom, X, labels);
        worst = std::max(worst, spectral_norm(commutator_with(a.matrix(), w)));
    }
    return worst / a_norm;
}

bool acts_within(const DenseOperator& a, const SiteSupport& support, const ChainGeometry& geom, double tol) {
    return local_commutator_epsilon(a, support, geom) <= tol;
}

}  // namespace sparselr
