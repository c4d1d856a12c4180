#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sparselr/geometry.hpp"
#include "sparselr/operator.hpp"
#include "sparselr/types.hpp"

namespace sparselr {

/// Nearest-neighbour interaction: Hermitian D^2 x D^2 terms keyed by the left
/// site x of bond (x, x+1). Missing bonds are zero.
class NNInteraction {
public:
    explicit NNInteraction(int site_dim);

    /// The same bond term on every bond of the chain, then per-bond overrides.
    static NNInteraction translation_invariant(const Matrix& bond, const ChainGeometry& geom,
                                               const std::map<int, Matrix>& overrides = {});

    void set_bond(int x, Matrix term);
    const Matrix* bond(int x) const;
    const std::map<int, Matrix>& bonds() const noexcept { return bonds_; }
    int site_dim() const noexcept { return site_dim_; }

    /// ||Phi|| = max over bonds of the operator norm.
    double strength() const;

private:
    int site_dim_;
    std::map<int, Matrix> bonds_;
};

/// On-site impurity lambda_x V_x with V_x = sum_j gamma_j P_j, rank-1 P_j and
/// D distinct eigenvalues.
struct ImpuritySite {
    int site = 0;
    double coupling = 0.0;
    std::vector<double> eigenvalues;
    std::vector<Matrix> projectors;

    int site_dim() const noexcept { return static_cast<int>(eigenvalues.size()); }
    /// Gamma_x = min_{i != j} |gamma_i - gamma_j|.
    double gap() const;
    Matrix V() const;
};

/// Minimum eigenvalue separation accepted for an impurity.
inline constexpr double kDegeneracyTol = 1e-8;

/// Validates projector completeness/orthogonality/rank and distinct eigenvalues.
ImpuritySite make_impurity(int site, std::vector<double> eigenvalues, std::vector<Matrix> projectors,
                           double coupling);

/// Eigendecomposes a Hermitian D x D matrix; rejects near-degenerate spectra.
ImpuritySite impurity_from_hermitian(int site, const Matrix& v, double coupling);

class ImpuritySpec {
public:
    ImpuritySpec() = default;
    explicit ImpuritySpec(std::vector<ImpuritySite> sites);

    const std::vector<ImpuritySite>& sites() const noexcept { return sites_; }
    bool empty() const noexcept { return sites_.empty(); }
    const ImpuritySite* find(int x) const;
    std::vector<int> positions() const;

private:
    std::vector<ImpuritySite> sites_;
};

/// sigma_F; +infinity for a single impurity.
double min_spacing(const ImpuritySpec& imp);

/// Z = [max S_A + 3, min S_B - 3] intersected with F.
std::vector<int> impurity_window(const SiteSupport& S_A, const SiteSupport& S_B, const ImpuritySpec& imp);

/// H_L = sum_x Phi_{x,x+1}.
DenseOperator build_nn_hamiltonian(const NNInteraction& phi, const ChainGeometry& geom);

/// sum over impurities in [-L, L] (except `exclude`) of lambda_y V_y.
DenseOperator build_field(const ImpuritySpec& imp, const ChainGeometry& geom, std::optional<int> exclude = {});

/// H_L(lambda) = H_L + sum lambda_x V_x.
DenseOperator build_perturbed_hamiltonian(const NNInteraction& phi, const ImpuritySpec& imp,
                                          const ChainGeometry& geom);

/// H-hat_x: both bonds touching x compressed block-diagonally in the V_x
/// eigenbasis. Field terms not included.
DenseOperator build_decoupled_hamiltonian(const NNInteraction& phi, const ImpuritySpec& imp, int x,
                                          const ChainGeometry& geom);

/// (H-hat_x^l on [-L, x], H-hat_x^r on [x, L]), both embedded on the full chain.
std::pair<DenseOperator, DenseOperator> decoupled_split(const NNInteraction& phi, const ImpuritySpec& imp, int x,
                                                        const ChainGeometry& geom);

/// R_jk = P_j (Phi_{x-1,x} + Phi_{x,x+1}) P_k on [x-1, x+1]; j != k, zero-based.
DenseOperator build_offdiagonal_R(const NNInteraction& phi, const ImpuritySpec& imp, int x, int j, int k,
                                  const ChainGeometry& geom);

}  // namespace sparselr
