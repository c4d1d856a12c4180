#pragma once

#include <functional>
#include <optional>
#include <string>

#include "sparselr/geometry.hpp"
#include "sparselr/model.hpp"

namespace sparselr {

struct SeriesValue {
    double value = 0.0;
    double tail_bound = 0.0;  // certified bound on the omitted terms
    int radius = 0;
};

/// c_mu = sum_x e^{-mu|x|} / (1+|x|)^2 truncated at |x| <= radius.
SeriesValue compute_c_mu(double mu, int radius);
/// Smallest radius whose certified tail is <= 1e-12 of the partial sum.
SeriesValue compute_c_mu(double mu);

struct KMuValue {
    double value = 0.0;
    int argmax = 0;  // maximizing n = |x - y|
    int radius = 0;
};

/// sup_n of the z-sum, n in [0, radius], |z| <= 3 radius. Throws
/// NonConvergence when the maximizer sits on the scan edge.
KMuValue compute_K_mu(double mu, int radius = 100);

/// mu, ||Phi|| and everything derived from them by the a priori bound.
struct LRParameters {
    double mu = 0.0;
    double phi_norm = 0.0;
    double c_mu = 0.0;
    double K_mu = 0.0;
    double C0 = 0.0;
    double v = 0.0;
    int series_radius = 0;
    double tail_bound = 0.0;
    int K_argmax = 0;

    /// Throws DomainError for mu <= 0 or phi_norm < 0, Error if C0 < 1.
    static LRParameters make(double mu, double phi_norm, int K_radius = 100);
};

double binom2(int D);

/// C0 (e^{v|t|} - 1) e^{-mu d}.
double apriori_bound(const LRParameters& p, double t, int dAB);

/// (mu d)^n e^{-mu d} and v|t| (1 + v|t|)^{n-1} e^{v|t|}; n >= 1.
double F_n(int n, double mu, double d);
double G_n(int n, double v, double t);

/// 444 C0^2 e^{5mu} / (mu (1 - e^{-mu})) ||Phi|| binom(D,2)^2.
double main_constant_C(const LRParameters& p, int D);

/// 218 C0^2 e^{5mu} / (mu (1 - e^{-mu})).
double C_mu_lemma44(const LRParameters& p);

/// Evaluated bound, or NOT_APPLICABLE with the failing hypothesis.
struct BoundResult {
    bool applicable = false;
    double value = 0.0;
    std::string reason;
    int N = 0;
    double lambda_gamma_product = 1.0;

    static BoundResult ok(double v) { return {true, v, {}}; }
    static BoundResult not_applicable(std::string why) { return {false, 0.0, std::move(why)}; }
};

/// C^N G_N(t) F_N(d) / prod_{x in Z} |lambda_x| Gamma_x for unit-norm
/// observables; N = 0 returns the a priori bound.
BoundResult main_bound(const LRParameters& p, int D, const SiteSupport& S_A, const SiteSupport& S_B,
                       const ImpuritySpec& imp, double t);

/// (K mu d (1 + v|t|) / lambda)^N e^{v|t|} e^{-mu d} with K = C / Gamma0.
/// Throws PreconditionError unless every impurity has coupling lambda and
/// the same V (hence gap Gamma0).
BoundResult corollary_bound(const LRParameters& p, int D, const SiteSupport& S_A, const SiteSupport& S_B,
                            const ImpuritySpec& imp, double t, double lambda, double Gamma0);

/// C / (|lambda| Gamma) G_1(t) mu min{d(x-3, S_B), d(x+3, S_A)} e^{-mu d}.
BoundResult single_impurity_bound(const LRParameters& p, int D, const SiteSupport& S_A, const SiteSupport& S_B,
                                  int x, double lambda_x, double Gamma_x, double t, double sigma_F);

/// Derivative bound of the single-impurity step:
/// C_mu binom(D,2) ||Phi|| mu d(x-3, S_B) v e^{v|t|} e^{-mu d}.
double single_impurity_derivative_bound(const LRParameters& p, int D, const SiteSupport& S_A,
                                        const SiteSupport& S_B, int x, double t);

using DecayFunction = std::function<double(double)>;

/// The finite sum h_mu(S_A, S_W, S_B). Needs max S_A < min S_W - 1 <= max S_W < min S_B.
double h_mu(const DecayFunction& f, double mu, const SiteSupport& S_A, const SiteSupport& S_W,
            const SiteSupport& S_B);

enum class DoubleCommutatorVariant { general, corollary };

/// Bound on ||[[W, tau_t(A)], tau_s(B)]||. `general` uses the supplied
/// commutator bound C_star g(t) f(d); `corollary` is the a priori special case and
/// ignores C_star, g, f. norm_product = ||A|| ||B|| ||W||.
double double_commutator_bound(const LRParameters& p, double C_star, const DecayFunction& g,
                               const DecayFunction& f, double norm_product, const SiteSupport& S_A,
                               const SiteSupport& S_W, const SiteSupport& S_B, double s, double t,
                               DoubleCommutatorVariant variant);

/// 72 C0^2 e^{mu (diam + 2)} / (1 - e^{-mu}).
double double_commutator_constant(const LRParameters& p, int diam_W);

/// G_{n-1}(t) + v int_0^t G_{n-1}(t-s) e^{vs} ds by adaptive Gauss-Kronrod
/// (requested relative accuracy 1e-12). n >= 2.
struct QuadratureValue {
    double value = 0.0;
    double error_estimate = 0.0;
};
QuadratureValue g_recursion_lhs(int n, double v, double t);

struct BoundReport {
    double t = 0.0;
    int dAB = 0;
    int N = 0;
    double lambda_gamma_product = 1.0;
    double apriori = 0.0;
    std::optional<double> main;
    std::optional<double> exact;

    /// exact <= apriori + tol and exact <= main + tol where present.
    bool consistent(double tol = 1e-9) const;
};

}  // namespace sparselr
