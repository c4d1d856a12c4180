#include <algorithm>
#include <string>

#include "doctest.h"
#include "test_support.hpp"

#include "sparselr/error.hpp"
#include "sparselr/model_io.hpp"

using namespace sparselr;
using testing::eye;
using testing::kron_oracle;

namespace {

// Full-chain bond term Phi_{x,x+1} by kron with identities.
Matrix bond_full(const Matrix& term, int x, const ChainGeometry& g) {
    const Index left = int_pow(g.D(), x + g.L());
    const Index right = int_pow(g.D(), g.L() - x - 1);
    return kron_oracle(kron_oracle(eye(left), term), eye(right));
}

Matrix site_full(const Matrix& term, int x, const ChainGeometry& g) {
    const Index left = int_pow(g.D(), x + g.L());
    const Index right = int_pow(g.D(), g.L() - x);
    return kron_oracle(kron_oracle(eye(left), term), eye(right));
}

double max_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

std::string error_of(const std::string& text) {
    try {
        parse_model(text, "m.json");
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("Heisenberg bond spectrum and norm") {
    const Matrix h = pauli::heisenberg_bond(0.7);
    const SpectralDecomposition sd = hermitian_eigensystem(h);
    // sigma.sigma has spectrum {-3, 1, 1, 1}
    CHECK(sd.eigenvalues(0) == doctest::Approx(-0.7));
    CHECK(sd.eigenvalues(2) == doctest::Approx(-0.7));
    CHECK(sd.eigenvalues(3) == doctest::Approx(2.1));
    const ChainGeometry g(2, 2);
    CHECK(NNInteraction::translation_invariant(h, g).strength() == doctest::Approx(2.1));
}

TEST_CASE("interaction validation") {
    NNInteraction phi(2);
    CHECK_THROWS_AS(phi.set_bond(0, Matrix::Identity(2, 2)), DimensionError);
    SplitMix64 rng(1);
    CHECK_THROWS_AS(phi.set_bond(0, random_matrix(4, rng)), PreconditionError);
    CHECK(phi.strength() == 0.0);
    CHECK(phi.bond(0) == nullptr);
}

TEST_CASE("impurity validation") {
    const testing::Matrix up = testing::sz_impurity(0, 1.0).projectors[0];
    const testing::Matrix down = testing::sz_impurity(0, 1.0).projectors[1];
    CHECK(testing::sz_impurity(0, 3.0).gap() == doctest::Approx(2.0));
    CHECK(max_diff(testing::sz_impurity(0, 3.0).V(), pauli::sz()) <= 1e-15);

    CHECK_THROWS_AS(make_impurity(0, {1.0, 1.0}, {up, down}, 1.0), PreconditionError);
    CHECK_THROWS_AS(make_impurity(0, {1.0, -1.0}, {up, up}, 1.0), PreconditionError);
    CHECK_THROWS_AS(make_impurity(0, {1.0, -1.0}, {up}, 1.0), PreconditionError);
    CHECK_THROWS_AS(make_impurity(0, {1.0, -1.0}, {Matrix(eye(2)), Matrix(Matrix::Zero(2, 2))}, 1.0),
                    PreconditionError);
    CHECK_THROWS_AS(impurity_from_hermitian(0, Matrix(eye(2)), 1.0), PreconditionError);

    SplitMix64 rng(2);
    const Matrix v = random_hermitian(3, rng);
    const ImpuritySite s = impurity_from_hermitian(1, v, 2.0);
    CHECK(max_diff(s.V(), v) <= 1e-13);
    std::vector<double> e = s.eigenvalues;
    std::sort(e.begin(), e.end());
    CHECK(s.gap() == doctest::Approx(std::min(e[1] - e[0], e[2] - e[1])));
}

TEST_CASE("impurity sets, spacing and window") {
    CHECK_THROWS(min_spacing(ImpuritySpec{}));
    CHECK(std::isinf(min_spacing(ImpuritySpec({testing::sz_impurity(0, 1.0)}))));
    const ImpuritySpec imp({testing::sz_impurity(5, 1.0), testing::sz_impurity(-2, 1.0), testing::sz_impurity(1, 1.0)});
    CHECK(min_spacing(imp) == 3.0);
    CHECK(imp.find(1) != nullptr);
    CHECK(imp.find(0) == nullptr);
    CHECK_THROWS(ImpuritySpec({testing::sz_impurity(0, 1.0), testing::sz_impurity(0, 2.0)}));
    // Z = [max S_A + 3, min S_B - 3] = [-2, 2]
    const std::vector<int> z = impurity_window(SiteSupport(-6, -5), SiteSupport(5, 6), imp);
    CHECK(z == std::vector<int>{-2, 1});
    CHECK(impurity_window(SiteSupport(-1, -1), SiteSupport(4, 4), imp).empty());
}

TEST_CASE("Hamiltonians against kron sums") {
    const ChainGeometry g(2, 2);
    SplitMix64 rng(3);
    const NNInteraction phi = testing::random_interaction(g, rng);
    const ImpuritySite site0 = testing::random_gap2_impurity(0, 4.0, rng);
    const ImpuritySite site2 = testing::random_gap2_impurity(2, -1.5, rng);
    const ImpuritySpec imp({site0, site2});

    Matrix h = Matrix::Zero(32, 32);
    for (int x = -2; x < 2; ++x) h += bond_full(*phi.bond(x), x, g);
    CHECK(max_diff(build_nn_hamiltonian(phi, g).matrix(), h) <= 1e-13);

    const Matrix field = 4.0 * site_full(site0.V(), 0, g) - 1.5 * site_full(site2.V(), 2, g);
    CHECK(max_diff(build_field(imp, g).matrix(), field) <= 1e-13);
    CHECK(max_diff(build_field(imp, g, 0).matrix(), -1.5 * site_full(site2.V(), 2, g)) <= 1e-13);
    CHECK(max_diff(build_perturbed_hamiltonian(phi, imp, g).matrix(), h + field) <= 1e-13);

    // compressed bonds: sum_j P_j (Phi_{-1,0} + Phi_{0,1}) P_j at x = 0
    const Matrix around = bond_full(*phi.bond(-1), -1, g) + bond_full(*phi.bond(0), 0, g);
    Matrix compressed = Matrix::Zero(32, 32);
    for (const Matrix& p : site0.projectors) {
        const Matrix P = site_full(p, 0, g);
        compressed += P * around * P;
    }
    const Matrix h_hat = h - around + compressed;
    CHECK(max_diff(build_decoupled_hamiltonian(phi, imp, 0, g).matrix(), h_hat) <= 1e-13);
    for (const Matrix& p : site0.projectors) {
        const Matrix P = site_full(p, 0, g);
        CHECK((h_hat * P - P * h_hat).cwiseAbs().maxCoeff() <= 1e-13);
    }

    Matrix sum_R = Matrix::Zero(32, 32);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            if (j == k) continue;
            const DenseOperator R = build_offdiagonal_R(phi, imp, 0, j, k, g);
            CHECK(R.support() == SiteSupport(-1, 1));
            const Matrix want = site_full(site0.projectors[j], 0, g) * around * site_full(site0.projectors[k], 0, g);
            CHECK(max_diff(embed_full(R, g).matrix(), want) <= 1e-13);
            sum_R += want;
        }
    CHECK(max_diff(h - h_hat, sum_R) <= 1e-13);

    const auto [left, right] = decoupled_split(phi, imp, 0, g);
    CHECK(max_diff(left.matrix() + right.matrix(), h_hat) <= 1e-13);
    CHECK(spectral_norm(commutator(left.matrix(), right.matrix())) <= 1e-12);

    CHECK_THROWS_AS(build_decoupled_hamiltonian(phi, imp, 1, g), PreconditionError);
    CHECK_THROWS_AS(build_decoupled_hamiltonian(phi, imp, 2, g), RangeError);
    CHECK_THROWS_AS(build_offdiagonal_R(phi, imp, 0, 1, 1, g), PreconditionError);
}

TEST_CASE("model files") {
    const std::string good = R"({
  "L": 2,
  "D": 2,
  "heisenberg_J": 1.0,
  "bonds": {"-2": [[1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,1]]},
  "impurities": [
    {"site": 0, "coupling": 50, "eigenvalues": [1, -1],
     "projectors": [[1,0,0,0], [0,0,0,1]]},
    {"site": 2, "coupling": 2, "hermitian": [[0,[0,-1]],[[0,1],0]]}
  ]
})";
    const ModelDescription m = parse_model(good);
    CHECK(m.geom.L() == 2);
    CHECK(m.imp.sites().size() == 2);
    CHECK(m.imp.find(0)->coupling == 50.0);
    CHECK(max_diff(m.imp.find(2)->V(), pauli::sy()) <= 1e-13);
    CHECK(max_diff(*m.phi.bond(-2), kron_oracle(pauli::sz(), pauli::sz())) <= 0.0);
    CHECK(max_diff(*m.phi.bond(0), pauli::heisenberg_bond(1.0)) <= 0.0);

    const std::string malformed = "{\n  \"L\": 2,\n  \"D\": 2\n  \"heisenberg_J\": 1\n}";
    CHECK(error_of(malformed).find("line 4") != std::string::npos);

    const std::string wrong_type = "{\n  \"L\": 2,\n  \"D\": \"two\"\n}";
    CHECK(error_of(wrong_type).find("line 3") != std::string::npos);

    const std::string degenerate = R"({
  "L": 2,
  "D": 2,
  "heisenberg_J": 1,
  "impurities": [
    {"site": 0, "coupling": 1, "eigenvalues": [1, 1],
     "projectors": [[1,0,0,0], [0,0,0,1]]}
  ]
})";
    const std::string msg = error_of(degenerate);
    CHECK(msg.find("distinct") != std::string::npos);
    CHECK(msg.find("line 6") != std::string::npos);

    const std::string outside = "{\n\"L\": 1,\n\"D\": 2,\n\"bonds\": {\"1\": [1,0,0,0, 0,0,0,0, 0,0,0,0, 0,0,0,0]}\n}";
    CHECK(error_of(outside).find("outside") != std::string::npos);
    CHECK(error_of(R"({"L": 1, "D": 3, "heisenberg_J": 1})").find("D = 2") != std::string::npos);
    CHECK(error_of(R"({"L": 1})").find("D") != std::string::npos);
}
