#include "sparselr/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>

#include "sparselr/csv.hpp"
#include "sparselr/dynamics.hpp"
#include "sparselr/error.hpp"
#include "sparselr/pauli.hpp"

namespace sparselr {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

double spacing(const ImpuritySpec& imp) {
    return imp.empty() ? std::numeric_limits<double>::infinity() : min_spacing(imp);
}

std::string parent_dir(const std::string& path) {
    const std::filesystem::path p = std::filesystem::path(path).parent_path();
    return p.empty() ? "." : p.string();
}

// Runs body(i) for i in [0, n) on OpenMP threads and rethrows the first
// failure by index, so the outcome does not depend on scheduling.
template <class F>
void parallel_for_indexed(std::size_t n, F&& body) {
    std::vector<std::exception_ptr> failures(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::size_t i = 0; i < n; ++i) try {
            body(i);
        } catch (...) {
            failures[i] = std::current_exception();
        }
    for (const auto& f : failures)
        if (f) std::rethrow_exception(f);
}

}  // namespace

// --- observables and model entries -----------------------------------------

ObservableSpec named_observable(const std::string& name, int site, const ChainGeometry& geom) {
    if (geom.D() != 2) throw PreconditionError("named Pauli observables need D = 2");
    if (!geom.contains(site)) throw RangeError("observable site " + std::to_string(site) + " outside the chain");
    return {name + "@" + std::to_string(site), DenseOperator(SiteSupport::site(site), pauli::named(name), 2)};
}

ObservableSpec observable_from_config(const ConfigNode& node, const ChainGeometry& geom) {
    if (!node.is_object()) node.fail("expected an observable object");
    try {
        if (node.has("op")) {
            return named_observable(node.at("op").as_string(), node.at("site").as_int(), geom);
        }
        SiteSupport S;
        if (node.has("sites")) {
            const ConfigNode s = node.at("sites");
            if (!s.is_array() || s.size() != 2) s.fail("expected [lo, hi]");
            S = SiteSupport(s.at(std::size_t{0}).as_int(), s.at(1).as_int());
        } else {
            S = SiteSupport::site(node.at("site").as_int());
        }
        geom.require_inside(S, "observable support");
        Matrix m = node.at("matrix").as_matrix(geom.dim_of(S));
        return {"matrix@" + S.str(), DenseOperator(S, std::move(m), geom.D())};
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        node.fail(e.what());
    } catch (const std::invalid_argument& e) {
        node.fail(e.what());
    }
}

ModelDescription model_from_entry(const ConfigNode& node, const std::string& base_dir) {
    if (node.is_string()) {
        std::filesystem::path p(node.as_string());
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        return load_model(p.string());
    }
    return model_from_config(node);
}

// --- verify ----------------------------------------------------------------

const char* bound_name(BoundKind k) {
    switch (k) {
        case BoundKind::apriori: return "apriori";
        case BoundKind::main: return "main";
        case BoundKind::corollary: return "corollary";
        case BoundKind::single_impurity: return "single_impurity";
        case BoundKind::double_commutator: return "double_commutator";
    }
    return "?";
}

BoundKind bound_from_name(const std::string& name) {
    for (BoundKind k : {BoundKind::apriori, BoundKind::main, BoundKind::corollary, BoundKind::single_impurity,
                        BoundKind::double_commutator}) {
        if (name == bound_name(k)) return k;
    }
    throw DomainError("unknown bound '" + name +
                      "' (expected apriori, main, corollary, single_impurity or double_commutator)");
}

bool ExperimentConfig::wants(BoundKind k) const {
    return std::find(bounds.begin(), bounds.end(), k) != bounds.end();
}

void ExperimentConfig::validate() const {
    if (t_grid.empty()) throw DomainError("t_grid must not be empty");
    for (double t : t_grid)
        if (!std::isfinite(t)) throw DomainError("t_grid entries must be finite");
    if (!(mu > 0.0)) throw DomainError("mu must be > 0");
    const ChainGeometry& g = model.geom;
    g.require_inside(A.op.support(), "A");
    g.require_inside(B.op.support(), "B");
    if (wants(BoundKind::double_commutator)) {
        if (!W) throw PreconditionError("the double_commutator bound needs an observable W");
        g.require_inside(W->op.support(), "W");
    }
}

ExperimentConfig experiment_from_config(const ConfigNode& node, const std::string& base_dir) {
    ModelDescription model = model_from_entry(node.at("model"), base_dir);
    const double mu = node.at("mu").as_double();
    ObservableSpec A = observable_from_config(node.at("A"), model.geom);
    ObservableSpec B = observable_from_config(node.at("B"), model.geom);
    std::optional<ObservableSpec> W;
    if (node.has("W")) W = observable_from_config(node.at("W"), model.geom);
    const ConfigNode tg = node.at("t_grid");
    std::vector<double> t_grid = tg.as_doubles();
    std::vector<BoundKind> bounds{BoundKind::apriori, BoundKind::main};
    if (node.has("bounds")) {
        bounds.clear();
        const ConfigNode b = node.at("bounds");
        for (const std::string& name : b.as_strings()) {
            try {
                bounds.push_back(bound_from_name(name));
            } catch (const Error& e) {
                b.fail(e.what());
            }
        }
    }
    std::optional<std::string> output;
    if (node.has("output")) output = node.at("output").as_string();
    std::optional<std::uint64_t> seed;
    if (node.has("seed")) seed = node.at("seed").as_u64();

    ExperimentConfig cfg{std::move(model), mu, std::move(A), std::move(B), std::move(W), std::move(t_grid),
                         std::move(bounds), std::move(output), seed, node.raw()};
    try {
        cfg.validate();
    } catch (const Error& e) {
        (cfg.t_grid.empty() ? tg : node).fail(e.what());
    }
    return cfg;
}

ExperimentConfig load_experiment(const std::string& path) {
    const ConfigDocument doc = ConfigDocument::load(path);
    return experiment_from_config(ConfigNode(doc), parent_dir(path));
}

const BoundEntry& ExperimentRecord::entry(BoundKind k) const {
    switch (k) {
        case BoundKind::apriori: return apriori;
        case BoundKind::main: return main;
        case BoundKind::corollary: return corollary;
        case BoundKind::single_impurity: return single_impurity;
        case BoundKind::double_commutator: return double_commutator;
    }
    return apriori;
}

std::vector<BoundKind> ExperimentRecord::violations() const {
    std::vector<BoundKind> out;
    for (BoundKind k : {BoundKind::apriori, BoundKind::main, BoundKind::corollary, BoundKind::single_impurity}) {
        const BoundEntry& e = entry(k);
        if (e.applicable && exact_norm > e.value + kViolationTol) out.push_back(k);
    }
    if (double_commutator.applicable && double_commutator_exact &&
        *double_commutator_exact > double_commutator.value + kViolationTol) {
        out.push_back(BoundKind::double_commutator);
    }
    return out;
}

namespace {

BoundEntry from_result(const BoundResult& r, double scale) {
    return {true, r.applicable, r.applicable ? r.value * scale : 0.0, r.reason};
}

BoundEntry not_applicable(std::string why) {
    return {true, false, 0.0, std::move(why)};
}

}  // namespace

VerifyResult run_verify(const ExperimentConfig& cfg) {
    cfg.validate();
    const ModelDescription& m = cfg.model;
    const ChainGeometry& geom = m.geom;
    const int D = geom.D();
    VerifyResult res;
    res.params = LRParameters::make(cfg.mu, m.phi.strength());
    const LRParameters& p = res.params;
    const EvolutionContext ctx(build_perturbed_hamiltonian(m.phi, m.imp, geom));

    const SiteSupport& SA = cfg.A.op.support();
    const SiteSupport& SB = cfg.B.op.support();
    const bool a_left = SA.hi < SB.lo;
    const bool disjoint = a_left || SB.hi < SA.lo;
    const SiteSupport SL = a_left ? SA : SB;
    const SiteSupport SR = a_left ? SB : SA;
    const double scale = operator_norm(cfg.A.op) * operator_norm(cfg.B.op);
    const int dAB = distance(SA, SB);
    const int N = disjoint ? static_cast<int>(impurity_window(SL, SR, m.imp).size()) : 0;
    const double sigma_F = spacing(m.imp);

    const Matrix Af = embed_full(cfg.A.op, geom).matrix();
    const Matrix Bf = embed_full(cfg.B.op, geom).matrix();
    std::optional<Matrix> Wf;
    double w_norm = 0.0;
    if (cfg.W) {
        Wf = embed_full(cfg.W->op, geom).matrix();
        w_norm = operator_norm(cfg.W->op);
    }

    res.records.resize(cfg.t_grid.size());
    parallel_for_indexed(cfg.t_grid.size(), [&](std::size_t i) {
        const auto start = std::chrono::steady_clock::now();
        ExperimentRecord& r = res.records[i];
        const double t = cfg.t_grid[i];
        r.t = t;
        r.dAB = dAB;
        r.N = N;
        const Matrix At = ctx.evolve(Af, t);
        r.exact_norm = spectral_norm(commutator(At, Bf));

        if (!disjoint) {
            for (BoundEntry* e : {&r.apriori, &r.main, &r.corollary, &r.single_impurity})
                *e = not_applicable("supports of A and B overlap");
        } else {
            r.apriori = {true, true, apriori_bound(p, t, dAB) * scale, {}};
            if (cfg.wants(BoundKind::main)) r.main = from_result(main_bound(p, D, SL, SR, m.imp, t), scale);
            if (cfg.wants(BoundKind::corollary)) {
                if (m.imp.empty()) {
                    r.corollary = not_applicable("no impurities");
                } else {
                    const ImpuritySite& s0 = m.imp.sites().front();
                    try {
                        r.corollary = from_result(
                            corollary_bound(p, D, SL, SR, m.imp, t, s0.coupling, s0.gap()), scale);
                    } catch (const PreconditionError& e) {
                        r.corollary = not_applicable(e.what());
                    }
                }
            }
            if (cfg.wants(BoundKind::single_impurity)) {
                r.single_impurity = not_applicable("no impurity in the open window (max S_A + 3, min S_B - 3)");
                for (const ImpuritySite& s : m.imp.sites()) {
                    const BoundResult b =
                        single_impurity_bound(p, D, SL, SR, s.site, s.coupling, s.gap(), t, sigma_F);
                    if (!b.applicable) {
                        if (SL.hi + 3 < s.site && s.site < SR.lo - 3) r.single_impurity = from_result(b, scale);
                        continue;
                    }
                    if (!r.single_impurity.applicable || b.value * scale < r.single_impurity.value) {
                        r.single_impurity = from_result(b, scale);
                        r.single_impurity.reason = "x = " + std::to_string(s.site);
                    }
                }
            }
        }
        if (!cfg.wants(BoundKind::apriori)) r.apriori = {};
        if (!cfg.wants(BoundKind::main)) r.main = {};
        if (!cfg.wants(BoundKind::corollary)) r.corollary = {};
        if (!cfg.wants(BoundKind::single_impurity)) r.single_impurity = {};

        if (cfg.wants(BoundKind::double_commutator)) {
            const SiteSupport& SW = cfg.W->op.support();
            const Matrix Bt = ctx.evolve(Bf, t);
            r.double_commutator_exact = spectral_norm(commutator(commutator(*Wf, At), Bt));
            try {
                const double v = double_commutator_bound(p, 0.0, {}, {}, w_norm * scale, SL, SW, SR, t, t,
                                                         DoubleCommutatorVariant::corollary);
                r.double_commutator = {true, true, v, "s = t"};
            } catch (const GeometryError& e) {
                r.double_commutator = not_applicable(e.what());
            }
        }
        r.wall_time_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });

    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const ExperimentRecord& r = res.records[i];
        const std::vector<BoundKind> bad = r.violations();
        if (!bad.empty()) {
            for (BoundKind k : bad) {
                const BoundEntry& e = r.entry(k);
                const double exact = k == BoundKind::double_commutator ? *r.double_commutator_exact : r.exact_norm;
                res.diagnostics.push_back("VIOLATION t = " + csv::format_double(r.t) + ": exact " +
                                          csv::format_double(exact) + " > " + bound_name(k) + " " +
                                          csv::format_double(e.value) + " (dAB = " + std::to_string(r.dAB) +
                                          ", N = " + std::to_string(r.N) + ")");
            }
            res.records.resize(i + 1);
            res.aborted = true;
            break;
        }
        if (!res.improvement && r.main.applicable && r.apriori.applicable && r.main.value < r.apriori.value) {
            res.improvement = i;
        }
    }
    return res;
}

void write_verify_csv(const VerifyResult& r, std::ostream& out) {
    csv::Writer w(out, {"t", "dAB", "N", "exact_norm", "apriori", "apriori_applicable", "main", "main_applicable",
                        "corollary", "corollary_applicable", "single_impurity", "single_impurity_applicable",
                        "double_commutator_exact", "double_commutator", "double_commutator_applicable",
                        "violated"});
    auto value = [](const BoundEntry& e) { return e.applicable ? std::optional<double>(e.value) : std::nullopt; };
    for (const ExperimentRecord& rec : r.records) {
        w << rec.t << rec.dAB << rec.N << rec.exact_norm;
        for (const BoundEntry* e : {&rec.apriori, &rec.main, &rec.corollary, &rec.single_impurity})
            w << value(*e) << e->applicable;
        w << rec.double_commutator_exact << value(rec.double_commutator) << rec.double_commutator.applicable;
        w << !rec.violations().empty();
        w.end_row();
    }
}

nlohmann::json verify_json(const ExperimentConfig& cfg, const VerifyResult& r) {
    using nlohmann::json;
    const LRParameters& p = r.params;
    json out;
    out["config"] = cfg.echo;
    out["params"] = {{"mu", p.mu},   {"phi_norm", p.phi_norm}, {"c_mu", p.c_mu},
                     {"K_mu", p.K_mu}, {"C0", p.C0},             {"v", p.v},
                     {"series_radius", p.series_radius}, {"tail_bound", p.tail_bound},
                     {"C", main_constant_C(p, cfg.model.geom.D())}};
    json recs = json::array();
    for (const ExperimentRecord& rec : r.records) {
        json b = json::object();
        for (BoundKind k : {BoundKind::apriori, BoundKind::main, BoundKind::corollary, BoundKind::single_impurity,
                            BoundKind::double_commutator}) {
            const BoundEntry& e = rec.entry(k);
            if (!e.requested) continue;
            b[bound_name(k)] = {{"applicable", e.applicable},
                                {"value", e.applicable ? json(e.value) : json(nullptr)},
                                {"reason", e.reason}};
        }
        json j = {{"t", rec.t}, {"dAB", rec.dAB}, {"N", rec.N}, {"exact_norm", rec.exact_norm},
                  {"bounds", b}, {"wall_time_ms", rec.wall_time_ms}};
        if (rec.double_commutator_exact) j["double_commutator_exact"] = *rec.double_commutator_exact;
        recs.push_back(std::move(j));
    }
    out["records"] = std::move(recs);
    if (r.improvement) {
        const ExperimentRecord& rec = r.records[*r.improvement];
        out["improvement"] = {{"t", rec.t}, {"main", rec.main.value}, {"apriori", rec.apriori.value}};
    } else {
        out["improvement"] = nullptr;
    }
    out["diagnostics"] = r.diagnostics;
    out["aborted"] = r.aborted;
    return out;
}

// --- identities ------------------------------------------------------------

Matrix random_matrix(Index n, SplitMix64& rng) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            const double re = 2.0 * rng.uniform() - 1.0;
            const double im = 2.0 * rng.uniform() - 1.0;
            m(i, j) = {re, im};
        }
    return m;
}

Matrix random_hermitian(Index n, SplitMix64& rng) {
    const Matrix m = random_matrix(n, rng);
    return 0.5 * (m + m.adjoint());
}

double approximation_worst_excess(const ChainGeometry& geom, const SiteSupport& X, int samples, std::uint64_t seed) {
    geom.require_inside(X, "conditional expectation region");
    double worst = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < samples; ++k) {
        SplitMix64 rng(SplitMix64::child_seed(seed, static_cast<std::uint64_t>(k)));
        const DenseOperator a(geom.full(), random_matrix(geom.total_dim(), rng), geom.D());
        const double eps = local_commutator_epsilon(a, X, geom);
        const double lhs = spectral_norm(a.matrix() - conditional_expectation(a, X, geom).matrix());
        worst = std::max(worst, lhs - eps * operator_norm(a));
    }
    return worst;
}

IdentitiesConfig identities_from_config(const ConfigNode& node, const std::string& base_dir) {
    IdentitiesConfig cfg{model_from_entry(node.at("model"), base_dir)};
    const ChainGeometry& g = cfg.model.geom;
    if (node.has("site")) {
        cfg.site = node.at("site").as_int();
    } else if (!cfg.model.imp.empty()) {
        cfg.site = cfg.model.imp.sites().front().site;
    } else {
        node.fail("no impurity to decouple: give 'site' or add an impurity");
    }
    if (node.has("A")) cfg.A = observable_from_config(node.at("A"), g);
    if (node.has("B")) cfg.B = observable_from_config(node.at("B"), g);
    if (node.has("t_grid")) {
        cfg.t_grid = node.at("t_grid").as_doubles();
        if (cfg.t_grid.empty()) node.at("t_grid").fail("t_grid must not be empty");
    }
    if (node.has("fd")) {
        const ConfigNode fd = node.at("fd");
        if (fd.has("s")) cfg.fd_s = fd.at("s").as_doubles();
        if (fd.has("t")) cfg.fd_t = fd.at("t").as_double();
        if (fd.has("h")) {
            cfg.fd_h = fd.at("h").as_double();
            if (!(cfg.fd_h > 0.0)) fd.at("h").fail("step must be > 0");
        }
    }
    if (node.has("conditional_expectation")) {
        const ConfigNode ce = node.at("conditional_expectation");
        if (ce.has("samples")) cfg.approx_samples = ce.at("samples").as_int();
        if (ce.has("X")) {
            const ConfigNode x = ce.at("X");
            if (!x.is_array() || x.size() != 2) x.fail("expected [lo, hi]");
            try {
                cfg.approx_X = SiteSupport(x.at(std::size_t{0}).as_int(), x.at(1).as_int());
                g.require_inside(*cfg.approx_X, "X");
            } catch (const ParseError&) {
                throw;
            } catch (const Error& e) {
                x.fail(e.what());
            }
        }
    }
    if (node.has("seed")) cfg.seed = node.at("seed").as_u64();
    cfg.echo = node.raw();
    return cfg;
}

bool IdentitiesReport::all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const IdentityResult& r) { return r.passed; });
}

namespace {

class IdentityRecorder {
public:
    explicit IdentityRecorder(IdentitiesReport& rep) : rep_(rep) {}

    void add(std::string name, std::string detail, double residual, double threshold) {
        rep_.results.push_back({std::move(name), std::move(detail), residual, threshold,
                                std::isfinite(residual) && residual <= threshold, {}});
    }
    void fail(std::string name, std::string detail, double threshold, const std::string& why) {
        rep_.results.push_back({std::move(name), std::move(detail), std::numeric_limits<double>::quiet_NaN(),
                                threshold, false, why});
    }

    // Runs body; an exception becomes one failed entry for `name`.
    template <class F>
    void guarded(const std::string& name, double threshold, F&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            fail(name, "", threshold, e.what());
        }
    }

private:
    IdentitiesReport& rep_;
};

std::string pair_str(int j, int k) {
    return "j=" + std::to_string(j) + " k=" + std::to_string(k);
}

}  // namespace

IdentitiesReport run_identities(const IdentitiesConfig& cfg) {
    IdentitiesReport rep;
    IdentityRecorder rec(rep);
    const ModelDescription& m = cfg.model;
    const ChainGeometry& geom = m.geom;
    const int D = geom.D();
    const int x = cfg.site;

    std::optional<ImpurityDecoupling> dec;
    std::optional<ObservableSpec> A = cfg.A, B = cfg.B;
    try {
        if (!A) A = named_observable("sz", -geom.L(), geom);
        if (!B) B = named_observable("sz", geom.L(), geom);
        dec.emplace(m.phi, m.imp, x, geom);
    } catch (const std::exception& e) {
        for (const char* name :
             {"decoupled_locality", "split_sum", "split_commute", "offdiagonal_decomposition", "phase_identity",
              "f_vanishes_at_equal_times", "derivative_finite_difference"}) {
            rec.fail(name, "", std::string(name) == "derivative_finite_difference" ? kFiniteDifferenceTol
                                                                                     : kIdentityTol,
                     e.what());
        }
    }

    if (dec) {
        const Matrix Af = embed_full(A->op, geom).matrix();
        const Matrix Bf = embed_full(B->op, geom).matrix();
        const double scale = operator_norm(A->op) * operator_norm(B->op);
        const ImpuritySite& imp = dec->impurity();

        rec.guarded("decoupled_locality", kIdentityTol, [&] {
            const SiteSupport& SA = A->op.support();
            const SiteSupport& SB = B->op.support();
            if (!(SA.hi < x && x < SB.lo)) {
                throw GeometryError("needs max S_A < x < min S_B (S_A = " + SA.str() + ", S_B = " + SB.str() + ")");
            }
            for (double t : cfg.t_grid) {
                const Matrix at = dec->decoupled().evolve(Af, t);
                rec.add("decoupled_locality", "t=" + fmt(t), spectral_norm(commutator(at, Bf)) / scale,
                        kIdentityTol);
            }
        });

        rec.guarded("split_sum", kIdentityTol, [&] {
            const auto [left, right] = decoupled_split(m.phi, m.imp, x, geom);
            const Matrix& h = dec->decoupled_hamiltonian();
            rec.add("split_sum", "", spectral_norm(left.matrix() + right.matrix() - h), kIdentityTol);
            rec.add("split_commute", "", spectral_norm(commutator(left.matrix(), right.matrix())), kIdentityTol);
        });

        rec.guarded("offdiagonal_decomposition", kIdentityTol, [&] {
            Matrix diff = dec->full().hamiltonian() - dec->decoupled().hamiltonian();
            for (int j = 0; j < D; ++j)
                for (int k = 0; k < D; ++k)
                    if (j != k) diff -= dec->R(j, k);
            rec.add("offdiagonal_decomposition", "", spectral_norm(diff), kIdentityTol);
        });

        rec.guarded("phase_identity", kIdentityTol, [&] {
            for (double s : cfg.t_grid)
                for (int j = 0; j < D; ++j)
                    for (int k = 0; k < D; ++k) {
                        if (j == k) continue;
                        const Matrix lhs = dec->decoupled().evolve(dec->R(j, k), s);
                        const cplx phase =
                            std::polar(1.0, s * imp.coupling * (imp.eigenvalues[j] - imp.eigenvalues[k]));
                        const Matrix rhs = phase * dec->decoupled_bar().evolve(dec->R(j, k), s);
                        rec.add("phase_identity", "s=" + fmt(s) + " " + pair_str(j, k), max_entry_norm(lhs - rhs),
                                kIdentityTol);
                    }
        });

        rec.guarded("f_vanishes_at_equal_times", kIdentityTol, [&] {
            for (double t : cfg.t_grid)
                for (int j = 0; j < D; ++j)
                    for (int k = 0; k < D; ++k) {
                        if (j == k) continue;
                        const Matrix f = dec->f(j, k, A->op, B->op, t, t);
                        rec.add("f_vanishes_at_equal_times", "t=" + fmt(t) + " " + pair_str(j, k),
                                spectral_norm(f) / scale, kIdentityTol);
                    }
        });

        rec.guarded("derivative_finite_difference", kFiniteDifferenceTol, [&] {
            const double h = cfg.fd_h, t = cfg.fd_t;
            for (double s : cfg.fd_s)
                for (int j = 0; j < D; ++j)
                    for (int k = 0; k < D; ++k) {
                        if (j == k) continue;
                        const Matrix exact = dec->f_derivative(j, k, A->op, B->op, s, t);
                        const Matrix fd = (dec->f(j, k, A->op, B->op, s + h, t) -
                                           dec->f(j, k, A->op, B->op, s - h, t)) /
                                          (2.0 * h);
                        const double ref = spectral_norm(exact);
                        const double err = spectral_norm(exact - fd);
                        rec.add("derivative_finite_difference",
                                "s=" + fmt(s) + " t=" + fmt(t) + " " + pair_str(j, k) + " |f'|=" + fmt(ref),
                                ref > 0.0 ? err / ref : err, kFiniteDifferenceTol);
                    }
        });
    }

    rec.guarded("conditional_expectation_approximation", kIdentityTol, [&] {
        const SiteSupport X = cfg.approx_X ? *cfg.approx_X : SiteSupport(-geom.L() + 1, geom.L() - 1);
        const double excess = approximation_worst_excess(geom, X, cfg.approx_samples, cfg.seed);
        rec.add("conditional_expectation_approximation",
                "X=" + X.str() + " samples=" + std::to_string(cfg.approx_samples), std::max(0.0, excess),
                kIdentityTol);
    });
    return rep;
}

void write_identities_csv(const IdentitiesReport& r, std::ostream& out) {
    csv::Writer w(out, {"identity", "detail", "residual", "threshold", "passed", "error"});
    for (const IdentityResult& res : r.results) {
        w << res.name << res.detail << res.residual << res.threshold << res.passed << res.error;
        w.end_row();
    }
}

// --- constants -------------------------------------------------------------

ConstantsRow constants_row(double mu, double phi_norm, int D) {
    ConstantsRow row;
    row.params = LRParameters::make(mu, phi_norm);
    row.D = D;
    row.C_thm31 = main_constant_C(row.params, D);
    row.C_mu_lem44 = C_mu_lemma44(row.params);
    return row;
}

void write_constants_csv(const std::vector<ConstantsRow>& rows, std::ostream& out) {
    csv::Writer w(out, {"mu", "phi_norm", "D", "c_mu", "K_mu", "C0", "v", "C_thm31", "C_mu_lem44", "series_radius"});
    for (const ConstantsRow& r : rows) {
        const LRParameters& p = r.params;
        w << p.mu << p.phi_norm << r.D << p.c_mu << p.K_mu << p.C0 << p.v << r.C_thm31 << r.C_mu_lem44
          << p.series_radius;
        w.end_row();
    }
}

}  // namespace sparselr
