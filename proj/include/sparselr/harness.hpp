#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparselr/bounds.hpp"
#include "sparselr/disorder.hpp"
#include "sparselr/model_io.hpp"
#include "sparselr/operator.hpp"

namespace sparselr {

inline constexpr double kViolationTol = 1e-9;
inline constexpr double kIdentityTol = 1e-9;
inline constexpr double kFiniteDifferenceTol = 1e-6;

/// {"site": x, "op": "sz"} or {"sites": [lo, hi], "matrix": ...}.
struct ObservableSpec {
    std::string label;
    DenseOperator op;
};

ObservableSpec observable_from_config(const ConfigNode& node, const ChainGeometry& geom);

/// Named Pauli on one site (D = 2 only).
ObservableSpec named_observable(const std::string& name, int site, const ChainGeometry& geom);

/// Reads "model" (inline object, or a path relative to `base_dir`).
ModelDescription model_from_entry(const ConfigNode& node, const std::string& base_dir);

// --- verify ----------------------------------------------------------------

enum class BoundKind { apriori, main, corollary, single_impurity, double_commutator };

const char* bound_name(BoundKind k);
BoundKind bound_from_name(const std::string& name);

struct ExperimentConfig {
    ModelDescription model;
    double mu = 1.0;
    ObservableSpec A;
    ObservableSpec B;
    std::optional<ObservableSpec> W;  // needed by double_commutator
    std::vector<double> t_grid;
    std::vector<BoundKind> bounds{BoundKind::apriori, BoundKind::main};
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    nlohmann::json echo;  // the config as read, for the JSON mirror

    bool wants(BoundKind k) const;
    void validate() const;
};

/// Keys: model, mu, A, B, W (optional), t_grid, bounds, output, seed.
ExperimentConfig experiment_from_config(const ConfigNode& node, const std::string& base_dir = ".");
ExperimentConfig load_experiment(const std::string& path);

struct BoundEntry {
    bool requested = false;
    bool applicable = false;
    double value = 0.0;
    std::string reason;
};

struct ExperimentRecord {
    double t = 0.0;
    int dAB = 0;
    int N = 0;
    double exact_norm = 0.0;
    BoundEntry apriori, main, corollary, single_impurity, double_commutator;
    std::optional<double> double_commutator_exact;  // ||[[W, tau_t(A)], tau_t(B)]||
    double wall_time_ms = 0.0;

    const BoundEntry& entry(BoundKind k) const;
    /// Applicable bounds the exact value exceeds by more than kViolationTol.
    std::vector<BoundKind> violations() const;
};

struct VerifyResult {
    LRParameters params;
    std::vector<ExperimentRecord> records;  // ordered as t_grid; truncated after a violation
    std::optional<std::size_t> improvement;  // first record with main < apriori
    std::vector<std::string> diagnostics;
    bool aborted = false;

    int exit_code() const { return aborted ? 2 : 0; }
};

VerifyResult run_verify(const ExperimentConfig& cfg);

/// Fixed column set; wall-clock time lives only in the JSON mirror so that
/// reruns produce byte-identical CSV.
void write_verify_csv(const VerifyResult& r, std::ostream& out);
nlohmann::json verify_json(const ExperimentConfig& cfg, const VerifyResult& r);

// --- identities ------------------------------------------------------------

struct IdentitiesConfig {
    ModelDescription model;
    int site = 0;
    std::optional<ObservableSpec> A{};  // default sigma^3 at -L (D = 2)
    std::optional<ObservableSpec> B{};  // default sigma^3 at  L
    std::vector<double> t_grid{0.25, 0.5, 1.0, 2.0};
    std::vector<double> fd_s{0.1, 0.3};
    double fd_t = 0.5;
    double fd_h = 1e-4;
    int approx_samples = 100;
    std::optional<SiteSupport> approx_X{};  // default [-L+1, L-1]
    std::uint64_t seed = 1;
    nlohmann::json echo{};
};

/// Keys: model, site, A, B, t_grid, fd {s, t, h}, conditional_expectation {samples, X}, seed.
IdentitiesConfig identities_from_config(const ConfigNode& node, const std::string& base_dir = ".");

struct IdentityResult {
    std::string name;
    std::string detail;
    double residual = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::string error;  // set when the identity could not be evaluated
};

struct IdentitiesReport {
    std::vector<IdentityResult> results;
    bool all_passed() const;
    int exit_code() const { return all_passed() ? 0 : 1; }
};

IdentitiesReport run_identities(const IdentitiesConfig& cfg);

/// Entries with real and imaginary parts uniform in [-1, 1).
Matrix random_matrix(Index n, SplitMix64& rng);
/// (M + M^dagger) / 2 of a random_matrix.
Matrix random_hermitian(Index n, SplitMix64& rng);

/// max over `samples` random full-chain A of ||(id - E_X)(A)|| - eps(A) ||A||.
double approximation_worst_excess(const ChainGeometry& geom, const SiteSupport& X, int samples, std::uint64_t seed);

void write_identities_csv(const IdentitiesReport& r, std::ostream& out);

// --- constants -------------------------------------------------------------

struct ConstantsRow {
    LRParameters params;
    int D = 2;
    double C_thm31 = 0.0;
    double C_mu_lem44 = 0.0;
};

ConstantsRow constants_row(double mu, double phi_norm, int D);

/// mu,phi_norm,D,c_mu,K_mu,C0,v,C_thm31,C_mu_lem44,series_radius
void write_constants_csv(const std::vector<ConstantsRow>& rows, std::ostream& out);

}  // namespace sparselr
