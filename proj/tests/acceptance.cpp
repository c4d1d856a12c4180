// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [N ...]     criteria to run (default: all of 1..8)
//
// Exit status is 0 only if every requested criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "test_support.hpp"

#include "sparselr/bounds.hpp"
#include "sparselr/csv.hpp"
#include "sparselr/disorder.hpp"
#include "sparselr/dynamics.hpp"
#include "sparselr/harness.hpp"

using namespace sparselr;

namespace {

struct Outcome {
    bool pass = true;
    std::string summary;
};

std::string g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

void detail(const std::string& line) {
    std::cout << "    " << line << '\n';
}

// Random instance of criteria 1 and 2: unit-norm random bonds, gap-2
// impurity at 0 in a random basis. The bonds depend on L only, so the three
// couplings share one interaction.
ModelDescription identity_instance(int L, double lambda) {
    const ChainGeometry geom(L, 2);
    SplitMix64 rng(1000 + L);
    NNInteraction phi = testing::random_interaction(geom, rng);
    ImpuritySpec imp({testing::random_gap2_impurity(0, lambda, rng)});
    return {geom, std::move(phi), std::move(imp)};
}

const std::vector<int> kLs{3, 4};
const std::vector<double> kLambdas{1.0, 5.0, 50.0};
const std::vector<double> kTimes{0.25, 0.5, 1.0, 2.0};

// --- 1 ---------------------------------------------------------------------

Outcome criterion1() {
    Outcome out;
    int failed = 0, total = 0;
    std::set<std::string> failed_names;
    for (int L : kLs)
        for (double lambda : kLambdas) {
            IdentitiesConfig cfg{identity_instance(L, lambda)};
            cfg.site = 0;
            cfg.t_grid = kTimes;
            cfg.fd_s = {0.1, 0.3};
            cfg.fd_t = 0.5;
            cfg.fd_h = 1e-4;
            cfg.approx_samples = 10;
            const IdentitiesReport rep = run_identities(cfg);
            std::map<std::string, std::pair<double, bool>> worst;  // name -> (max residual, all passed)
            std::vector<std::string> order;
            for (const IdentityResult& r : rep.results) {
                ++total;
                failed += !r.passed;
                if (!r.passed) failed_names.insert(r.name);
                if (!worst.count(r.name)) {
                    order.push_back(r.name);
                    worst[r.name] = {0.0, true};
                }
                auto& w = worst[r.name];
                w.first = std::max(w.first, std::isnan(r.residual) ? INFINITY : r.residual);
                w.second = w.second && r.passed;
                if (!r.error.empty()) detail("L=" + std::to_string(L) + " lambda=" + g(lambda) + " " + r.name +
                                             ": " + r.error);
            }
            for (const std::string& name : order) {
                const auto& [res, ok] = worst[name];
                const double thr = name == "derivative_finite_difference" ? kFiniteDifferenceTol : kIdentityTol;
                detail(std::string(ok ? "ok   " : "FAIL ") + "L=" + std::to_string(L) + " lambda=" + g(lambda) +
                       " " + name + ": max residual " + g(res) + " (threshold " + g(thr) + ")");
            }
        }
    out.pass = failed == 0;
    out.summary = "proof-identity suite, L = 3..4, lambda in {1, 5, 50}: " + std::to_string(total - failed) + "/" +
                  std::to_string(total) + " checks within tolerance";
    if (failed_names == std::set<std::string>{"derivative_finite_difference"}) {
        // at h = 1e-4 the O(h^2) truncation grows like lambda^2, while at L = 4 |f| is ~1e-7 but is
        // assembled from O(1) commutators, so eps-level cancellation noise / h dominates
        out.summary += "; only the finite-difference derivative check fails: truncation ~ h^2 lambda^2 at large "
                       "lambda, roundoff ~ eps / (h |f'|) at L = 4 where |f'| ~ 1e-5";
    }
    return out;
}

// --- 2 ---------------------------------------------------------------------

Outcome criterion2() {
    Outcome out;
    int points = 0, main_points = 0, violations = 0;
    double worst_apriori = 0.0, worst_main = 0.0;  // max exact / bound
    for (int L : kLs)
        for (double lambda : kLambdas) {
            const ModelDescription m = identity_instance(L, lambda);
            const ChainGeometry& geom = m.geom;
            const LRParameters p = LRParameters::make(1.0, m.phi.strength());
            const EvolutionContext ctx(build_perturbed_hamiltonian(m.phi, m.imp, geom));
            SplitMix64 rng(77 + L);
            // sigma^3 plus one random Hermitian pair per instance
            std::vector<std::pair<Matrix, Matrix>> obs{{pauli::sz(), pauli::sz()},
                                                       {random_hermitian(2, rng), random_hermitian(2, rng)}};
            for (const auto& [a, b] : obs) {
                const DenseOperator A(SiteSupport::site(-L), a, 2), B(SiteSupport::site(L), b, 2);
                const double scale = operator_norm(A) * operator_norm(B);
                for (double t : kTimes) {
                    ++points;
                    const double exact = commutator_norm_evolved(ctx, A, B, t);
                    const double ap = apriori_bound(p, t, 2 * L) * scale;
                    worst_apriori = std::max(worst_apriori, exact / ap);
                    if (exact > ap + kViolationTol) {
                        ++violations;
                        detail("VIOLATION apriori L=" + std::to_string(L) + " lambda=" + g(lambda) + " t=" + g(t));
                    }
                    const BoundResult mb = main_bound(p, 2, A.support(), B.support(), m.imp, t);
                    if (mb.applicable) {
                        ++main_points;
                        worst_main = std::max(worst_main, exact / (mb.value * scale));
                        if (exact > mb.value * scale + kViolationTol) {
                            ++violations;
                            detail("VIOLATION main L=" + std::to_string(L) + " lambda=" + g(lambda) + " t=" + g(t));
                        }
                    }
                }
            }
        }
    detail("max exact/apriori = " + g(worst_apriori) + ", max exact/main = " + g(worst_main) + " over " +
           std::to_string(main_points) + " points where the impurity bound applies (L = 4 only)");
    out.pass = violations == 0 && main_points > 0;
    out.summary = "bound dominance on " + std::to_string(points) + " grid points: " + std::to_string(violations) +
                  " violations";
    return out;
}

// --- 3 ---------------------------------------------------------------------

Outcome criterion3() {
    Outcome out;
    const ChainGeometry geom(4, 2);
    ExperimentConfig cfg{
        ModelDescription{geom, NNInteraction::translation_invariant(pauli::heisenberg_bond(1.0), geom),
                         ImpuritySpec({testing::sz_impurity(0, 50.0)})},
        1.0,
        named_observable("sz", -4, geom),
        named_observable("sz", 4, geom),
        std::nullopt,
        {0.25, 0.5, 1.0}};
    for (int k = -12; k <= 4; ++k) cfg.t_grid.push_back(std::pow(2.0, k));  // finer scan, 2^-12 .. 16
    const VerifyResult r = run_verify(cfg);
    double best = INFINITY, best_t = 0.0;
    for (const ExperimentRecord& rec : r.records) {
        if (!rec.main.applicable || rec.apriori.value <= 0.0) continue;
        const double ratio = rec.main.value / rec.apriori.value;
        if (ratio < best) {
            best = ratio;
            best_t = rec.t;
        }
    }
    const LRParameters& p = r.params;
    const double C = main_constant_C(p, 2);
    detail("C = " + g(C) + ", C0 = " + g(p.C0) + ", v = " + g(p.v) + ", d(A,B) = 8, N = 1");
    detail("smallest main/apriori over " + std::to_string(r.records.size()) + " grid points: " + g(best) +
           " at t = " + g(best_t));
    detail("as t -> 0 the ratio tends to C mu d / (lambda Gamma C0); it drops below 1 only for lambda > " +
           g(C * 8.0 / (2.0 * p.C0)));
    out.pass = r.improvement.has_value() && !r.aborted;
    out.summary = out.pass ? "improvement found at t = " + g(r.records[*r.improvement].t)
                           : "no grid point with main < apriori at lambda = 50 (not attainable with these constants)";
    return out;
}

// --- 4 ---------------------------------------------------------------------

double c_bruteforce(double mu) {
    long double s = 0.0L;
    for (int x = -200; x <= 200; ++x) {
        const long double ax = std::abs(x);
        s += std::exp(-(long double)mu * ax) / ((1 + ax) * (1 + ax));
    }
    return static_cast<double>(s);
}

double K_bruteforce(double mu) {
    long double best = 0.0L;
    for (int y = -300; y <= 300; ++y) {  // x = 0 by translation invariance
        long double s = 0.0L;
        for (int z = std::min(0, y) - 300; z <= std::max(0, y) + 300; ++z) {
            const long double xz = std::abs(z), zy = std::abs(z - y), xy = std::abs(y);
            s += std::exp(-(long double)mu * (xz + zy - xy)) * (1 + xy) * (1 + xy) /
                 ((1 + xz) * (1 + xz) * (1 + zy) * (1 + zy));
        }
        best = std::max(best, s);
    }
    return static_cast<double>(best);
}

Outcome criterion4() {
    Outcome out;
    double worst_c = 0.0, worst_K = 0.0, worst_Cp = 0.0;
    for (double mu : {0.5, 1.0, 2.0}) {
        const LRParameters p = LRParameters::make(mu, 1.0);
        const double dc = std::abs(p.c_mu - c_bruteforce(mu));
        const double dK = std::abs(p.K_mu - K_bruteforce(mu));
        worst_c = std::max(worst_c, dc);
        worst_K = std::max(worst_K, dK);
        // evaluator with diam S_W = 4, unit norms, s = t = 0: value / (d e^{-mu d}) is the constant
        const SiteSupport A = SiteSupport::site(-5), W(-2, 2), B = SiteSupport::site(6);
        const double v =
            double_commutator_bound(p, 0.0, {}, {}, 1.0, A, W, B, 0.0, 0.0, DoubleCommutatorVariant::corollary);
        const double constant = v / (distance(W.lo - 1, B) * std::exp(-mu * distance(A, B)));
        const double Cp = 72.0 * p.C0 * p.C0 * std::exp(6.0 * mu) / (1.0 - std::exp(-mu));
        const double rel = std::abs(constant - Cp) / Cp;
        worst_Cp = std::max(worst_Cp, rel);
        detail("mu=" + g(mu) + ": c_mu=" + csv::format_double(p.c_mu) + " (|diff| " + g(dc) + "), K_mu=" +
               csv::format_double(p.K_mu) + " (|diff| " + g(dK) + ", argmax n=" + std::to_string(p.K_argmax) +
               "), C0=" + g(p.C0) + ", C' rel err " + g(rel));
        out.pass = out.pass && dc <= 1e-10 && dK <= 1e-10 && p.C0 >= 1.0 && rel <= 1e-12;
    }
    out.summary = "constants vs brute force: max |dc| " + g(worst_c) + ", max |dK| " + g(worst_K) +
                  ", C' max rel err " + g(worst_Cp) + ", C0 >= 1";
    return out;
}

// --- 5 ---------------------------------------------------------------------

Outcome criterion5() {
    Outcome out;
    int points = 0, violations = 0;
    double worst = 0.0;
    const std::vector<double> grid{0.1, 0.25, 0.5, 1.0};
    for (std::uint64_t seed : {501, 502, 503}) {
        const ChainGeometry geom(4, 2);
        SplitMix64 rng(seed);
        const NNInteraction phi = testing::random_interaction(geom, rng);
        const ImpuritySpec imp({testing::random_gap2_impurity(0, seed == 501 ? 1.0 : 20.0, rng)});
        const EvolutionContext ctx(build_perturbed_hamiltonian(phi, imp, geom));
        const LRParameters p = LRParameters::make(1.0, phi.strength());
        const DenseOperator A(SiteSupport::site(-4), random_hermitian(2, rng), 2);
        const DenseOperator B(SiteSupport::site(4), random_hermitian(2, rng), 2);
        const Matrix Af = embed_full(A, geom).matrix(), Bf = embed_full(B, geom).matrix();
        for (int lo : {-2, -1, 0, 1}) {
            const DenseOperator W(SiteSupport(lo, lo + 2), random_hermitian(8, rng), 2);
            const Matrix Wf = embed_full(W, geom).matrix();
            const double norms = operator_norm(A) * operator_norm(B) * operator_norm(W);
            for (double t : grid) {
                const Matrix At = ctx.evolve(Af, t);
                const Matrix inner = commutator(Wf, At);
                for (double s : grid) {
                    ++points;
                    const double exact = spectral_norm(commutator(inner, ctx.evolve(Bf, s)));
                    const double bound = double_commutator_bound(p, 0.0, {}, {}, norms, A.support(), W.support(),
                                                                 B.support(), s, t, DoubleCommutatorVariant::corollary);
                    worst = std::max(worst, exact / bound);
                    if (exact > bound + kViolationTol) ++violations;
                }
            }
        }
    }
    detail("double commutator: " + std::to_string(points) + " points, max exact/bound " + g(worst) + ", " +
           std::to_string(violations) + " violations");

    struct Chain {
        int L, D;
        SiteSupport X;
    };
    double worst_excess = -INFINITY;
    int chains = 0;
    for (const Chain& c : std::vector<Chain>{{1, 2, SiteSupport(0, 0)},
                                             {2, 2, SiteSupport(-1, 1)},
                                             {2, 2, SiteSupport(0, 0)},
                                             {3, 2, SiteSupport(-2, 2)},
                                             {3, 2, SiteSupport(-3, 1)},
                                             {1, 3, SiteSupport(0, 0)},
                                             {1, 4, SiteSupport(-1, 0)},
                                             {1, 6, SiteSupport(-1, 0)}}) {
        const ChainGeometry geom(c.L, c.D);
        const double excess = approximation_worst_excess(geom, c.X, 100, 900 + chains);
        ++chains;
        worst_excess = std::max(worst_excess, excess);
        detail("conditional expectation L=" + std::to_string(c.L) + " D=" + std::to_string(c.D) + " dim=" +
               std::to_string(geom.total_dim()) + " X=" + c.X.str() + ": max ||(id-E_X)A|| - eps||A|| = " +
               g(excess));
        if (excess > 1e-9) ++violations;
    }
    out.pass = violations == 0;
    out.summary = "double-commutator bound on " + std::to_string(points) + " points and conditional expectation on " +
                  std::to_string(chains) + " chains x 100 samples: " + std::to_string(violations) + " violations";
    return out;
}

// --- 6 ---------------------------------------------------------------------

Outcome criterion6() {
    Outcome out;
    int f_bad = 0, g_bad = 0, q_bad = 0, q_points = 0;
    double worst_slack = -INFINITY, worst_err = 0.0;
    for (double mu : {0.5, 1.0, 2.0}) {
        for (int n = 1; n <= 6; ++n) {
            const double lo = n / mu, hi = lo + 50.0 / mu;
            double prev = F_n(n, mu, lo);
            for (int i = 1; i <= 2000; ++i) {
                const double f = F_n(n, mu, lo + (hi - lo) * i / 2000.0);
                if (f > prev * (1 + 1e-15)) ++f_bad;
                prev = f;
            }
        }
        const LRParameters p = LRParameters::make(mu, 1.0);
        for (int n = 1; n <= 6; ++n)
            for (int i = 0; i <= 200; ++i) {
                const double t = 10.0 / p.v * i / 200.0;
                if (G_n(n, p.v, t) > G_n(n + 1, p.v, t)) ++g_bad;
            }
        for (int n = 2; n <= 5; ++n)
            for (int i = 0; i <= 50; ++i) {
                const double t = 5.0 / p.v * i / 50.0;
                const QuadratureValue q = g_recursion_lhs(n, p.v, t);
                ++q_points;
                worst_slack = std::max(worst_slack, q.value - G_n(n, p.v, t));
                worst_err = std::max(worst_err, q.error_estimate);
                if (q.value > G_n(n, p.v, t) + 1e-8) ++q_bad;
            }
    }
    detail("F_n monotonicity breaks: " + std::to_string(f_bad) + ", G_n ordering breaks: " + std::to_string(g_bad));
    detail("recursion: " + std::to_string(q_points) + " points, max (lhs - G_n) = " + g(worst_slack) +
           ", max quadrature error estimate " + g(worst_err));
    out.pass = f_bad == 0 && g_bad == 0 && q_bad == 0;
    out.summary = "F_n nonincreasing past n/mu, G_n <= G_{n+1}, recursion inequality within 1e-8 (n = 2..5)";
    return out;
}

// --- 7 / 8 -----------------------------------------------------------------

DisorderConfig criterion7_config() {
    DisorderConfig cfg;
    cfg.L = 3;
    cfg.n_realizations = 1000;
    cfg.seed = 20260301;
    cfg.t_grid = {0.5};
    return cfg;
}

std::string sweep_csv(const DisorderConfig& cfg, int threads) {
    omp_set_num_threads(threads);
    std::ostringstream os;
    write_disorder_csv(monte_carlo_sweep(cfg), os);
    return os.str();
}

Outcome criterion7() {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();

    SplitMix64 rng(31337);
    std::vector<double> xs(100000);
    for (double& x : xs) x = sample_heavy_tail(0.25, rng.uniform());
    std::sort(xs.begin(), xs.end());
    double ks = 0.0;
    const double n = static_cast<double>(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double F = 1.0 - std::pow(xs[i], -0.25);
        ks = std::max({ks, (i + 1) / n - F, F - i / n});
    }
    detail("KS distance vs 1 - r^-0.25 over 1e5 samples: " + g(ks));

    const DisorderConfig cfg = criterion7_config();
    const int saved = omp_get_max_threads();
    const std::string base = sweep_csv(cfg, 1);
    bool identical = base == sweep_csv(cfg, 1);
    for (int threads : {2, 4}) identical = identical && base == sweep_csv(cfg, threads);
    omp_set_num_threads(saved);
    detail(std::string("sweep CSV byte-identical across reruns and 1/2/4 threads: ") + (identical ? "yes" : "no"));

    const DisorderReport rep = monte_carlo_sweep(cfg);
    const DisorderSummary& s = rep.summaries.front();
    detail("L=3, 1000 realizations, t=0.5: events " + std::to_string(s.events) + ", applicable " +
           std::to_string(s.applicable) + ", violations " + std::to_string(s.violations));
    if (s.applicable == 0) {
        detail("no realization is applicable at L = 3 (the support separation needs L >= 4); the zero-violation "
               "count is vacuous");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    detail("runtime " + g(secs) + " s");
    out.pass = ks <= 0.01 && identical && rep.violations() == 0;
    out.summary = "heavy-tail sampler, sweep determinism, conditional bound: KS " + g(ks) + ", " +
                  std::to_string(rep.violations()) + " violations among " + std::to_string(s.applicable) +
                  " applicable realizations";
    return out;
}

Outcome criterion8() {
    Outcome out;
    DisorderConfig cfg = criterion7_config();
    cfg.n_realizations = 200;
    const DisorderReport rep = monte_carlo_sweep(cfg);
    bool substitution = false;
    for (const std::string& note : rep.notes) {
        detail("note: " + note);
        substitution |= note.find("not reproduced") != std::string::npos &&
                        note.find("empirical event frequency") != std::string::npos;
    }
    const DisorderSummary& s = rep.summaries.front();
    detail("event frequency " + g(s.frequency) + " [" + g(s.interval.lo) + ", " + g(s.interval.hi) + "]");
    out.pass = substitution && s.interval.lo <= s.frequency && s.frequency <= s.interval.hi;
    out.summary = "probability bound replaced by empirical frequency + Wilson interval, documented in the run notes";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                         criterion5, criterion6, criterion7, criterion8};
    std::vector<int> which;
    for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
    if (which.empty())
        for (int i = 1; i <= 8; ++i) which.push_back(i);

    bool all = true;
    for (int c : which) {
        if (c < 1 || c > 8) {
            std::cerr << "unknown criterion " << c << '\n';
            return 1;
        }
        Outcome o;
        try {
            o = criteria[c - 1]();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c << ": " << o.summary << std::endl;
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
