#include "sparselr/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "sparselr/error.hpp"
#include "sparselr/kernels.hpp"

namespace sparselr {

namespace {

constexpr double kProjectorTol = 1e-10;

Matrix embed_bond(const Matrix& term, int x, const ChainGeometry& geom) {
    const Index left = geom.dim_of_sites(x + geom.L());
    const Index right = geom.dim_of_sites(geom.L() - x - 1);
    return kernels::parallel::pad_identity(term, left, right);
}

Matrix embed_site(const Matrix& term, int x, const ChainGeometry& geom) {
    const Index left = geom.dim_of_sites(x + geom.L());
    const Index right = geom.dim_of_sites(geom.L() - x);
    return kernels::parallel::pad_identity(term, left, right);
}

const ImpuritySite& require_decouplable(const ImpuritySpec& imp, int x, const ChainGeometry& geom) {
    const ImpuritySite* site = imp.find(x);
    if (site == nullptr) {
        throw PreconditionError("site " + std::to_string(x) + " is not an impurity");
    }
    if (x < -geom.L() + 2 || x > geom.L() - 2) {
        throw RangeError("impurity " + std::to_string(x) + " must lie in [-L+2, L-2] to decouple");
    }
    if (site->site_dim() != geom.D()) {
        throw DimensionError("impurity dimension does not match geometry");
    }
    return *site;
}

// Sum_j P_j term P_j with P_j acting on the `side` factor of a two-site term
// (0 = left site, 1 = right site).
Matrix compress_bond(const Matrix& term, const ImpuritySite& site, int side) {
    const Index D = site.site_dim();
    const Matrix id = Matrix::Identity(D, D);
    Matrix out = Matrix::Zero(term.rows(), term.cols());
    for (const Matrix& p : site.projectors) {
        const Matrix pp = side == 0 ? kernels::serial::kron(p, id) : kernels::serial::kron(id, p);
        out += pp * term * pp;
    }
    return out;
}

}  // namespace

// --- NNInteraction -------------------------------------------------------

NNInteraction::NNInteraction(int site_dim) : site_dim_(site_dim) {
    if (site_dim < 2) throw DomainError("on-site dimension must be >= 2");
}

NNInteraction NNInteraction::translation_invariant(const Matrix& bond, const ChainGeometry& geom,
                                                   const std::map<int, Matrix>& overrides) {
    NNInteraction phi(geom.D());
    for (int x = -geom.L(); x < geom.L(); ++x) phi.set_bond(x, bond);
    for (const auto& [x, term] : overrides) phi.set_bond(x, term);
    return phi;
}

void NNInteraction::set_bond(int x, Matrix term) {
    const Index d2 = static_cast<Index>(site_dim_) * site_dim_;
    if (term.rows() != d2 || term.cols() != d2) {
        throw DimensionError("bond term at " + std::to_string(x) + " must be " + std::to_string(d2) + "x" +
                             std::to_string(d2));
    }
    if (!is_hermitian(term)) {
        throw PreconditionError("bond term at " + std::to_string(x) + " is not Hermitian");
    }
    bonds_[x] = std::move(term);
}

const Matrix* NNInteraction::bond(int x) const {
    auto it = bonds_.find(x);
    return it == bonds_.end() ? nullptr : &it->second;
}

double NNInteraction::strength() const {
    double s = 0.0;
    for (const auto& [x, term] : bonds_) s = std::max(s, spectral_norm(term));
    return s;
}

// --- impurities ------------------------------------------------------------

double ImpuritySite::gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eigenvalues.size(); ++i)
        for (std::size_t j = i + 1; j < eigenvalues.size(); ++j)
            g = std::min(g, std::abs(eigenvalues[i] - eigenvalues[j]));
    return g;
}

Matrix ImpuritySite::V() const {
    const Index D = site_dim();
    Matrix v = Matrix::Zero(D, D);
    for (std::size_t j = 0; j < projectors.size(); ++j) v += eigenvalues[j] * projectors[j];
    return v;
}

ImpuritySite make_impurity(int site, std::vector<double> eigenvalues, std::vector<Matrix> projectors,
                           double coupling) {
    const std::string where = "impurity at " + std::to_string(site) + ": ";
    const std::size_t D = eigenvalues.size();
    if (D < 2) throw DomainError(where + "needs at least two eigenvalues");
    if (projectors.size() != D) {
        throw PreconditionError(where + "expected " + std::to_string(D) + " projectors (one per eigenvalue)");
    }
    Matrix sum = Matrix::Zero(D, D);
    for (std::size_t i = 0; i < D; ++i) {
        const Matrix& p = projectors[i];
        if (p.rows() != static_cast<Index>(D) || p.cols() != static_cast<Index>(D)) {
            throw DimensionError(where + "projector has wrong dimension");
        }
        if (!is_hermitian(p, kProjectorTol)) throw PreconditionError(where + "projector is not Hermitian");
        if (std::abs(p.trace() - 1.0) > kProjectorTol) throw PreconditionError(where + "projector is not rank 1");
        for (std::size_t j = 0; j < D; ++j) {
            const Matrix prod = p * projectors[j];
            const Matrix expect = i == j ? p : Matrix::Zero(D, D);
            if (max_entry_norm(prod - expect) > kProjectorTol) {
                throw PreconditionError(where + "projectors are not mutually orthogonal idempotents");
            }
        }
        sum += p;
    }
    if (max_entry_norm(sum - Matrix::Identity(D, D)) > kProjectorTol) {
        throw PreconditionError(where + "projectors do not sum to the identity");
    }
    ImpuritySite out{site, coupling, std::move(eigenvalues), std::move(projectors)};
    if (!(out.gap() > kDegeneracyTol)) {
        throw PreconditionError(where + "eigenvalues must be distinct (gap > 1e-8)");
    }
    return out;
}

ImpuritySite impurity_from_hermitian(int site, const Matrix& v, double coupling) {
    const SpectralDecomposition s = hermitian_eigensystem(v);
    const Index D = v.rows();
    std::vector<double> eigenvalues(D);
    std::vector<Matrix> projectors(D);
    for (Index j = 0; j < D; ++j) {
        eigenvalues[j] = s.eigenvalues(j);
        const auto psi = s.eigenvectors.col(j);
        projectors[j] = psi * psi.adjoint();
    }
    for (Index j = 1; j < D; ++j) {
        if (eigenvalues[j] - eigenvalues[j - 1] < kDegeneracyTol) {
            throw PreconditionError("impurity at " + std::to_string(site) +
                                    ": Hermitian matrix has (near-)degenerate eigenvalues");
        }
    }
    return make_impurity(site, std::move(eigenvalues), std::move(projectors), coupling);
}

ImpuritySpec::ImpuritySpec(std::vector<ImpuritySite> sites) : sites_(std::move(sites)) {
    std::sort(sites_.begin(), sites_.end(), [](const auto& a, const auto& b) { return a.site < b.site; });
    for (std::size_t i = 1; i < sites_.size(); ++i) {
        if (sites_[i].site == sites_[i - 1].site) {
            throw PreconditionError("duplicate impurity site " + std::to_string(sites_[i].site));
        }
    }
}

const ImpuritySite* ImpuritySpec::find(int x) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), x, [](const auto& s, int v) { return s.site < v; });
    return it != sites_.end() && it->site == x ? &*it : nullptr;
}

std::vector<int> ImpuritySpec::positions() const {
    std::vector<int> out;
    out.reserve(sites_.size());
    for (const auto& s : sites_) out.push_back(s.site);
    return out;
}

double min_spacing(const ImpuritySpec& imp) {
    if (imp.empty()) throw PreconditionError("min_spacing of an empty impurity set");
    double best = std::numeric_limits<double>::infinity();
    const auto& s = imp.sites();
    for (std::size_t i = 1; i < s.size(); ++i) best = std::min(best, double(s[i].site - s[i - 1].site));
    return best;
}

std::vector<int> impurity_window(const SiteSupport& S_A, const SiteSupport& S_B, const ImpuritySpec& imp) {
    const int lo = S_A.hi + 3;
    const int hi = S_B.lo - 3;
    std::vector<int> out;
    for (const auto& s : imp.sites())
        if (lo <= s.site && s.site <= hi) out.push_back(s.site);
    return out;
}

// --- Hamiltonians -------------------------------------------------------

DenseOperator build_nn_hamiltonian(const NNInteraction& phi, const ChainGeometry& geom) {
    if (phi.site_dim() != geom.D()) throw DimensionError("interaction dimension does not match geometry");
    const Index n = geom.total_dim();
    Matrix h = Matrix::Zero(n, n);
    for (const auto& [x, term] : phi.bonds()) {
        if (x < -geom.L() || x > geom.L() - 1) {
            throw RangeError("bond (" + std::to_string(x) + "," + std::to_string(x + 1) + ") outside the chain");
        }
        h += embed_bond(term, x, geom);
    }
    return {geom.full(), std::move(h), geom.D()};
}

DenseOperator build_field(const ImpuritySpec& imp, const ChainGeometry& geom, std::optional<int> exclude) {
    const Index n = geom.total_dim();
    Matrix v = Matrix::Zero(n, n);
    for (const auto& s : imp.sites()) {
        if (!geom.contains(s.site) || (exclude && *exclude == s.site)) continue;
        if (s.site_dim() != geom.D()) throw DimensionError("impurity dimension does not match geometry");
        v += s.coupling * embed_site(s.V(), s.site, geom);
    }
    return {geom.full(), std::move(v), geom.D()};
}

DenseOperator build_perturbed_hamiltonian(const NNInteraction& phi, const ImpuritySpec& imp,
                                          const ChainGeometry& geom) {
    for (const auto& s : imp.sites()) {
        if (!geom.contains(s.site)) {
            throw RangeError("impurity site " + std::to_string(s.site) + " outside the chain");
        }
        if (s.coupling == 0.0) {
            throw PreconditionError("impurity coupling at " + std::to_string(s.site) + " must be nonzero");
        }
    }
    DenseOperator h = build_nn_hamiltonian(phi, geom);
    return {geom.full(), h.matrix() + build_field(imp, geom).matrix(), geom.D()};
}

std::pair<DenseOperator, DenseOperator> decoupled_split(const NNInteraction& phi, const ImpuritySpec& imp, int x,
                                                        const ChainGeometry& geom) {
    const ImpuritySite& site = require_decouplable(imp, x, geom);
    const Index n = geom.total_dim();
    Matrix left = Matrix::Zero(n, n), right = Matrix::Zero(n, n);
    for (const auto& [y, term] : phi.bonds()) {
        if (y < -geom.L() || y > geom.L() - 1) {
            throw RangeError("bond (" + std::to_string(y) + "," + std::to_string(y + 1) + ") outside the chain");
        }
        if (y == x - 1) {
            left += embed_bond(compress_bond(term, site, 1), y, geom);
        } else if (y == x) {
            right += embed_bond(compress_bond(term, site, 0), y, geom);
        } else if (y < x) {
            left += embed_bond(term, y, geom);
        } else {
            right += embed_bond(term, y, geom);
        }
    }
    return {DenseOperator(geom.full(), std::move(left), geom.D()),
            DenseOperator(geom.full(), std::move(right), geom.D())};
}

DenseOperator build_decoupled_hamiltonian(const NNInteraction& phi, const ImpuritySpec& imp, int x,
                                          const ChainGeometry& geom) {
    auto [left, right] = decoupled_split(phi, imp, x, geom);
    return {geom.full(), left.matrix() + right.matrix(), geom.D()};
}

DenseOperator build_offdiagonal_R(const NNInteraction& phi, const ImpuritySpec& imp, int x, int j, int k,
                                  const ChainGeometry& geom) {
    const ImpuritySite& site = require_decouplable(imp, x, geom);
    const int D = geom.D();
    if (j == k) throw PreconditionError("R_jk requires j != k");
    if (j < 0 || k < 0 || j >= D || k >= D) throw RangeError("projector index out of range");

    using kernels::serial::kron;
    const Matrix id = Matrix::Identity(D, D);
    const Index d3 = static_cast<Index>(D) * D * D;
    Matrix bonds = Matrix::Zero(d3, d3);
    if (const Matrix* b = phi.bond(x - 1)) bonds += kron(*b, id);
    if (const Matrix* b = phi.bond(x)) bonds += kron(id, *b);
    const Matrix pj = kron(kron(id, site.projectors[j]), id);
    const Matrix pk = kron(kron(id, site.projectors[k]), id);
    return {SiteSupport(x - 1, x + 1), pj * bonds * pk, D};
}

}  // namespace sparselr
