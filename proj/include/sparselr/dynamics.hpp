#pragma once

#include <array>
#include <optional>
#include <vector>

#include "sparselr/model.hpp"
#include "sparselr/operator.hpp"

namespace sparselr {

/// Exact Heisenberg dynamics tau_t(A) = e^{itH} A e^{-itH} from a cached
/// eigendecomposition of a full-chain Hamiltonian. Immutable once built.
class EvolutionContext {
public:
    /// Throws if the spectral reconstruction residual exceeds 1e-10.
    explicit EvolutionContext(const DenseOperator& hamiltonian);

    const ChainGeometry& geometry() const noexcept { return geom_; }
    const Matrix& hamiltonian() const noexcept { return hamiltonian_; }
    const RealVector& eigenvalues() const noexcept { return spectrum_.eigenvalues; }
    const Matrix& eigenvectors() const noexcept { return spectrum_.eigenvectors; }
    double residual() const noexcept { return residual_; }

    /// Full-chain matrices in, full-chain matrix out. t = 0 returns `a` unchanged.
    Matrix evolve(const Matrix& a, double t) const;

    Matrix to_eigenbasis(const Matrix& a) const;
    /// Evolves an operator already expressed in the eigenbasis.
    Matrix evolve_from_eigenbasis(const Matrix& a_eig, double t) const;

private:
    ChainGeometry geom_;
    Matrix hamiltonian_;
    SpectralDecomposition spectrum_;
    Matrix u_adjoint_;
    double residual_;
};

inline constexpr double kSpectralResidualTol = 1e-10;

/// tau_t(a), embedded on the full chain first.
DenseOperator heisenberg_evolve(const EvolutionContext& ctx, const DenseOperator& a, double t);

/// || [tau_t(a), b] || with both operands embedded on the full chain.
double commutator_norm_evolved(const EvolutionContext& ctx, const DenseOperator& a, const DenseOperator& b,
                               double t);

/// The objects of the integration-by-parts argument around one impurity x:
/// off-diagonal blocks R_jk and the three dynamics generated by H(lambda),
/// H-hat_x(lambda) = H-hat_x + V(lambda) and H-hat_x + V-bar_x(lambda).
class ImpurityDecoupling {
public:
    ImpurityDecoupling(const NNInteraction& phi, const ImpuritySpec& imp, int x, const ChainGeometry& geom);

    int site() const noexcept { return x_; }
    const ImpuritySite& impurity() const noexcept { return impurity_; }
    const ChainGeometry& geometry() const noexcept { return geom_; }
    double min_spacing() const noexcept { return min_spacing_; }

    /// Full-chain R_jk (zero-based j != k).
    const Matrix& R(int j, int k) const;
    /// H-hat_x without field terms.
    const Matrix& decoupled_hamiltonian() const noexcept { return h_hat_; }

    const EvolutionContext& full() const noexcept { return full_; }
    const EvolutionContext& decoupled() const noexcept { return decoupled_; }
    const EvolutionContext& decoupled_bar() const noexcept { return decoupled_bar_; }

    /// tau-hat_s tau_{t-s}(a) for a full-chain matrix a.
    Matrix interpolated(const Matrix& a, double s, double t) const;

    /// f_jk(s,t) = [[tau^{H-hat + V-bar}_s(R_jk), tau-hat_s tau_{t-s}(A)], B].
    Matrix f(int j, int k, const DenseOperator& a, const DenseOperator& b, double s, double t) const;

    /// Analytic d/ds f_jk(s,t). Needs sigma_F >= 2.
    Matrix f_derivative(int j, int k, const DenseOperator& a, const DenseOperator& b, double s, double t) const;

private:
    void check_observables(const DenseOperator& a, const DenseOperator& b) const;
    void check_pair(int j, int k) const;

    ChainGeometry geom_;
    int x_;
    ImpuritySite impurity_;
    double min_spacing_;
    Matrix h_hat_;
    std::vector<Matrix> r_;  // D*D slots, diagonal unused
    EvolutionContext full_;
    EvolutionContext decoupled_;
    EvolutionContext decoupled_bar_;
};

}  // namespace sparselr
