#include "sparselr/dynamics.hpp"

#include "sparselr/error.hpp"
#include "sparselr/kernels.hpp"

namespace sparselr {

namespace {

using kernels::parallel::multiply;

ChainGeometry geometry_of(const DenseOperator& h) {
    const SiteSupport& s = h.support();
    if (s.lo != -s.hi) {
        throw SupportMismatch("evolution needs a full-chain Hamiltonian on [-L, L], got " + s.str());
    }
    return {s.hi, h.site_dim()};
}

const ImpuritySite& lookup(const ImpuritySpec& imp, int x) {
    const ImpuritySite* site = imp.find(x);
    if (site == nullptr) throw PreconditionError("site " + std::to_string(x) + " is not an impurity");
    return *site;
}

Matrix full_matrix(const DenseOperator& a, const ChainGeometry& geom) {
    return embed_full(a, geom).matrix();
}

}  // namespace

// --- EvolutionContext ------------------------------------------------------

EvolutionContext::EvolutionContext(const DenseOperator& hamiltonian)
    : geom_(geometry_of(hamiltonian)),
      hamiltonian_(hamiltonian.matrix()),
      spectrum_(hermitian_spectral(hamiltonian)),
      u_adjoint_(spectrum_.eigenvectors.adjoint()),
      residual_(reconstruction_residual(spectrum_, hamiltonian_)) {
    if (residual_ > kSpectralResidualTol) {
        throw Error("spectral reconstruction residual " + std::to_string(residual_) + " exceeds 1e-10");
    }
}

Matrix EvolutionContext::to_eigenbasis(const Matrix& a) const {
    return multiply(multiply(u_adjoint_, a), spectrum_.eigenvectors);
}

Matrix EvolutionContext::evolve_from_eigenbasis(const Matrix& a_eig, double t) const {
    Matrix phased = a_eig;
    kernels::parallel::apply_phases(phased, spectrum_.eigenvalues, t);
    return multiply(multiply(spectrum_.eigenvectors, phased), u_adjoint_);
}

Matrix EvolutionContext::evolve(const Matrix& a, double t) const {
    if (a.rows() != hamiltonian_.rows() || a.cols() != hamiltonian_.cols()) {
        throw DimensionError("evolve: observable dimension does not match the Hamiltonian");
    }
    if (t == 0.0) return a;
    return evolve_from_eigenbasis(to_eigenbasis(a), t);
}

DenseOperator heisenberg_evolve(const EvolutionContext& ctx, const DenseOperator& a, double t) {
    const ChainGeometry& geom = ctx.geometry();
    return {geom.full(), ctx.evolve(full_matrix(a, geom), t), geom.D()};
}

double commutator_norm_evolved(const EvolutionContext& ctx, const DenseOperator& a, const DenseOperator& b,
                               double t) {
    const ChainGeometry& geom = ctx.geometry();
    const Matrix at = ctx.evolve(full_matrix(a, geom), t);
    return spectral_norm(commutator(at, full_matrix(b, geom)));
}

// --- ImpurityDecoupling ----------------------------------------------------

ImpurityDecoupling::ImpurityDecoupling(const NNInteraction& phi, const ImpuritySpec& imp, int x,
                                       const ChainGeometry& geom)
    : geom_(geom),
      x_(x),
      impurity_(lookup(imp, x)),
      min_spacing_(sparselr::min_spacing(imp)),
      h_hat_(build_decoupled_hamiltonian(phi, imp, x, geom).matrix()),
      r_(static_cast<std::size_t>(geom.D()) * geom.D()),
      full_(build_perturbed_hamiltonian(phi, imp, geom)),
      decoupled_(DenseOperator(geom.full(), h_hat_ + build_field(imp, geom).matrix(), geom.D())),
      decoupled_bar_(DenseOperator(geom.full(), h_hat_ + build_field(imp, geom, x).matrix(), geom.D())) {
    const int D = geom.D();
    for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k)
            if (j != k) r_[j * D + k] = full_matrix(build_offdiagonal_R(phi, imp, x, j, k, geom), geom);
}

void ImpurityDecoupling::check_pair(int j, int k) const {
    const int D = geom_.D();
    if (j == k) throw PreconditionError("f_jk requires j != k");
    if (j < 0 || k < 0 || j >= D || k >= D) throw RangeError("projector index out of range");
}

const Matrix& ImpurityDecoupling::R(int j, int k) const {
    check_pair(j, k);
    return r_[j * geom_.D() + k];
}

void ImpurityDecoupling::check_observables(const DenseOperator& a, const DenseOperator& b) const {
    if (!(a.support().hi + 1 < x_ && x_ < b.support().lo)) {
        throw GeometryError("f_jk needs max S_A + 1 < x < min S_B (S_A = " + a.support().str() +
                            ", x = " + std::to_string(x_) + ", S_B = " + b.support().str() + ")");
    }
}

Matrix ImpurityDecoupling::interpolated(const Matrix& a, double s, double t) const {
    return decoupled_.evolve(full_.evolve(a, t - s), s);
}

Matrix ImpurityDecoupling::f(int j, int k, const DenseOperator& a, const DenseOperator& b, double s,
                             double t) const {
    check_pair(j, k);
    check_observables(a, b);
    const Matrix rs = decoupled_bar_.evolve(R(j, k), s);
    const Matrix inner = interpolated(full_matrix(a, geom_), s, t);
    return commutator(commutator(rs, inner), full_matrix(b, geom_));
}

Matrix ImpurityDecoupling::f_derivative(int j, int k, const DenseOperator& a, const DenseOperator& b, double s,
                                        double t) const {
    check_pair(j, k);
    check_observables(a, b);
    if (min_spacing_ < 2.0) {
        throw PreconditionError("the derivative formula needs sigma_F >= 2");
    }
    const int D = geom_.D();
    const Matrix bm = full_matrix(b, geom_);
    const Matrix inner = interpolated(full_matrix(a, geom_), s, t);
    const Matrix& rjk = R(j, k);

    const Matrix hr = decoupled_bar_.evolve(commutator(h_hat_, rjk), s);
    Matrix out = I * commutator(commutator(hr, inner), bm);

    const Matrix rs = decoupled_bar_.evolve(rjk, s);
    Matrix sum = Matrix::Zero(inner.rows(), inner.cols());
    for (int l = 0; l < D; ++l)
        for (int r = 0; r < D; ++r) {
            if (l == r) continue;
            const Matrix rlr = decoupled_.evolve(R(l, r), s);
            sum += commutator(rs, commutator(rlr, inner));
        }
    out -= I * commutator(sum, bm);
    return out;
}

}  // namespace sparselr
