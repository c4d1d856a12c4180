#include "sparselr/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sparselr/error.hpp"

namespace sparselr {

namespace {

void require_mu(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("mu must be a positive finite number");
}

// Upper bound for sum_{|x| > R} e^{-mu|x|} / (1+|x|)^2.
double c_mu_tail(double mu, int R) {
    return 2.0 * std::exp(-mu * (R + 1)) / ((R + 2.0) * (R + 2.0) * (1.0 - std::exp(-mu)));
}

double c_mu_sum(double mu, int R) {
    double s = 0.0;
    for (int x = R; x >= 1; --x) s += 2.0 * std::exp(-mu * x) / ((1.0 + x) * (1.0 + x));
    return s + 1.0;
}

double K_inner(double mu, int n, int zmax) {
    // only z outside [0, n] carries exponential decay
    double s = 0.0;
    for (int z = -zmax; z <= zmax; ++z) {
        const double a = std::abs(z), b = std::abs(n - z);
        const double e = std::exp(-mu * (a + b - n));
        s += e * (1.0 + n) * (1.0 + n) / ((1.0 + a) * (1.0 + a) * (1.0 + b) * (1.0 + b));
    }
    return s;
}

double spacing(const ImpuritySpec& imp) {
    return imp.empty() ? std::numeric_limits<double>::infinity() : min_spacing(imp);
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

SeriesValue compute_c_mu(double mu, int radius) {
    require_mu(mu);
    if (radius < 0) throw DomainError("series radius must be >= 0");
    return {c_mu_sum(mu, radius), c_mu_tail(mu, radius), radius};
}

SeriesValue compute_c_mu(double mu) {
    require_mu(mu);
    int R = 0;
    while (c_mu_tail(mu, R) > 1e-12 * c_mu_sum(mu, R)) {
        if (++R > 1000000) throw NonConvergence("c_mu: series radius exceeds 10^6");
    }
    return compute_c_mu(mu, R);
}

KMuValue compute_K_mu(double mu, int radius) {
    require_mu(mu);
    if (radius < 1) throw DomainError("K_mu scan radius must be >= 1");
    KMuValue best{-1.0, 0, radius};
    for (int n = 0; n <= radius; ++n) {
        const double s = K_inner(mu, n, 3 * radius);
        if (s > best.value) best = {s, n, radius};
    }
    if (best.argmax == radius) {
        throw NonConvergence("K_mu: maximizer at the scan edge n = " + std::to_string(radius) +
                             " (mu = " + fmt(mu) + "); raise the radius");
    }
    return best;
}

LRParameters LRParameters::make(double mu, double phi_norm, int K_radius) {
    require_mu(mu);
    if (!(phi_norm >= 0.0) || !std::isfinite(phi_norm)) throw DomainError("||Phi|| must be >= 0");
    const SeriesValue c = compute_c_mu(mu);
    const KMuValue K = compute_K_mu(mu, K_radius);
    LRParameters p;
    p.mu = mu;
    p.phi_norm = phi_norm;
    p.c_mu = c.value;
    p.K_mu = K.value;
    p.C0 = 10.0 * c.value / K.value;
    p.v = 8.0 * std::exp(mu) * K.value * phi_norm;
    p.series_radius = c.radius;
    p.tail_bound = c.tail_bound;
    p.K_argmax = K.argmax;
    if (p.C0 < 1.0) throw Error("C0 = " + fmt(p.C0) + " < 1 at mu = " + fmt(mu));
    return p;
}

double binom2(int D) {
    return 0.5 * D * (D - 1);
}

double apriori_bound(const LRParameters& p, double t, int dAB) {
    if (dAB < 0) throw DomainError("distance must be >= 0");
    return p.C0 * std::expm1(p.v * std::abs(t)) * std::exp(-p.mu * dAB);
}

double F_n(int n, double mu, double d) {
    if (n < 1) throw DomainError("F_n needs n >= 1");
    return std::pow(mu * d, n) * std::exp(-mu * d);
}

double G_n(int n, double v, double t) {
    if (n < 1) throw DomainError("G_n needs n >= 1");
    const double vt = v * std::abs(t);
    return vt * std::pow(1.0 + vt, n - 1) * std::exp(vt);
}

double main_constant_C(const LRParameters& p, int D) {
    if (D < 2) throw DomainError("D must be >= 2");
    const double b = binom2(D);
    return 444.0 * p.C0 * p.C0 * std::exp(5.0 * p.mu) / (p.mu * (1.0 - std::exp(-p.mu))) * p.phi_norm * b * b;
}

double C_mu_lemma44(const LRParameters& p) {
    return 218.0 * p.C0 * p.C0 * std::exp(5.0 * p.mu) / (p.mu * (1.0 - std::exp(-p.mu)));
}

BoundResult main_bound(const LRParameters& p, int D, const SiteSupport& S_A, const SiteSupport& S_B,
                       const ImpuritySpec& imp, double t) {
    const double sigma = spacing(imp);
    const double need = std::max(1.0 / p.mu, 2.0);
    if (!(sigma > need)) {
        return BoundResult::not_applicable("sigma_F = " + fmt(sigma) + " is not > max{1/mu, 2} = " + fmt(need));
    }
    if (!(S_A.hi + 3 < S_B.lo - 3)) {
        return BoundResult::not_applicable("supports not separated: max S_A + 3 >= min S_B - 3");
    }
    const int d = distance(S_A, S_B);
    const std::vector<int> Z = impurity_window(S_A, S_B, imp);
    const int N = static_cast<int>(Z.size());
    if (N == 0) {
        BoundResult r = BoundResult::ok(apriori_bound(p, t, d));
        r.reason = "empty impurity window; a priori bound";
        return r;
    }
    double prod = 1.0;
    for (int x : Z) {
        const ImpuritySite& s = *imp.find(x);
        prod *= std::abs(s.coupling) * s.gap();
    }
    const double C = main_constant_C(p, D);
    BoundResult r = BoundResult::ok(std::pow(C, N) * G_n(N, p.v, t) * F_n(N, p.mu, d) / prod);
    r.N = N;
    r.lambda_gamma_product = prod;
    return r;
}

BoundResult corollary_bound(const LRParameters& p, int D, const SiteSupport& S_A, const SiteSupport& S_B,
                            const ImpuritySpec& imp, double t, double lambda, double Gamma0) {
    if (!(Gamma0 > 0.0)) throw PreconditionError("Gamma0 must be > 0");
    if (!imp.empty()) {
        const ImpuritySite& ref = imp.sites().front();
        const Matrix V0 = ref.V();
        for (const ImpuritySite& s : imp.sites()) {
            if (s.coupling != lambda) {
                throw PreconditionError("corollary bound needs the uniform coupling lambda = " + fmt(lambda) +
                                        " (site " + std::to_string(s.site) + " has " + fmt(s.coupling) + ")");
            }
            if ((s.V() - V0).cwiseAbs().maxCoeff() > 1e-12) {
                throw PreconditionError("corollary bound needs translation-invariant impurities V_x = T_x(V_0)");
            }
        }
        if (std::abs(ref.gap() - Gamma0) > 1e-12 * std::max(1.0, Gamma0)) {
            throw PreconditionError("Gamma0 does not match the impurity gap " + fmt(ref.gap()));
        }
    }
    const BoundResult m = main_bound(p, D, S_A, S_B, imp, t);
    if (!m.applicable || m.N == 0) return m;
    const int d = distance(S_A, S_B);
    const double K = main_constant_C(p, D) / Gamma0;
    const double vt = p.v * std::abs(t);
    const double base = K * p.mu * d * (1.0 + vt) / std::abs(lambda);
    BoundResult r = BoundResult::ok(std::pow(base, m.N) * std::exp(vt) * std::exp(-p.mu * d));
    r.N = m.N;
    r.lambda_gamma_product = m.lambda_gamma_product;
    return r;
}

BoundResult single_impurity_bound(const LRParameters& p, int D, const SiteSupport& S_A, const SiteSupport& S_B,
                                  int x, double lambda_x, double Gamma_x, double t, double sigma_F) {
    if (!(S_A.hi + 3 < x && x < S_B.lo - 3)) {
        return BoundResult::not_applicable("impurity not in the open window (max S_A + 3, min S_B - 3)");
    }
    if (!(sigma_F >= 2.0)) return BoundResult::not_applicable("sigma_F = " + fmt(sigma_F) + " < 2");
    const int arm = std::min(distance(x - 3, S_B), distance(x + 3, S_A));
    const int d = distance(S_A, S_B);
    const double C = main_constant_C(p, D);
    BoundResult r = BoundResult::ok(C / (std::abs(lambda_x) * Gamma_x) * G_n(1, p.v, t) * p.mu * arm *
                                    std::exp(-p.mu * d));
    r.N = 1;
    r.lambda_gamma_product = std::abs(lambda_x) * Gamma_x;
    return r;
}

double single_impurity_derivative_bound(const LRParameters& p, int D, const SiteSupport& S_A,
                                        const SiteSupport& S_B, int x, double t) {
    return C_mu_lemma44(p) * binom2(D) * p.phi_norm * p.mu * distance(x - 3, S_B) * p.v *
           std::exp(p.v * std::abs(t)) * std::exp(-p.mu * distance(S_A, S_B));
}

double h_mu(const DecayFunction& f, double mu, const SiteSupport& S_A, const SiteSupport& S_W,
            const SiteSupport& S_B) {
    if (!(S_A.hi < S_W.lo - 1 && S_W.hi < S_B.lo)) {
        throw GeometryError("h_mu needs max S_A < min S_W - 1 <= max S_W < min S_B (S_A = " + S_A.str() +
                            ", S_W = " + S_W.str() + ", S_B = " + S_B.str() + ")");
    }
    const int dAW = distance(S_A, S_W);
    const int dWB = distance(S_W, S_B);
    const int DW = dWB + S_W.diam() + 1;
    double h = f(distance(S_A, S_B)) + f(dAW - 1) * std::exp(-mu * dWB);
    for (int m = 1; m <= DW; ++m) h += f(dAW + m - 2) * std::exp(-mu * (DW - m));
    return h;
}

double double_commutator_constant(const LRParameters& p, int diam_W) {
    return 72.0 * p.C0 * p.C0 * std::exp(p.mu * (diam_W + 2)) / (1.0 - std::exp(-p.mu));
}

double double_commutator_bound(const LRParameters& p, double C_star, const DecayFunction& g,
                               const DecayFunction& f, double norm_product, const SiteSupport& S_A,
                               const SiteSupport& S_W, const SiteSupport& S_B, double s, double t,
                               DoubleCommutatorVariant variant) {
    if (variant == DoubleCommutatorVariant::corollary) {
        if (!(S_A.hi < S_W.lo - 1 && S_W.hi < S_B.lo)) {
            throw GeometryError("double commutator bound needs max S_A < min S_W - 1 <= max S_W < min S_B");
        }
        return double_commutator_constant(p, S_W.diam()) * norm_product * std::exp(p.v * (std::abs(t) + std::abs(s))) *
               distance(S_W.lo - 1, S_B) * std::exp(-p.mu * distance(S_A, S_B));
    }
    const double h = h_mu(f, p.mu, S_A, S_W, S_B);
    return 24.0 * p.C0 * std::exp(p.mu) / (1.0 - std::exp(-p.mu)) * C_star * norm_product * g(t) *
           std::exp(p.v * std::abs(s)) * h;
}

QuadratureValue g_recursion_lhs(int n, double v, double t) {
    if (n < 2) throw DomainError("the recursion check needs n >= 2");
    const double T = std::abs(t);
    auto integrand = [&](double s) { return G_n(n - 1, v, T - s) * std::exp(v * s); };
    double err = 0.0;
    const double I = T == 0.0 ? 0.0
                              : boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, T, 15,
                                                                                              1e-12, &err);
    return {G_n(n - 1, v, T) + v * I, v * err};
}

bool BoundReport::consistent(double tol) const {
    if (!exact) return true;
    if (*exact > apriori + tol) return false;
    if (main && *exact > *main + tol) return false;
    return true;
}

}  // namespace sparselr
