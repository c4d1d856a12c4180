#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sparselr/bounds.hpp"
#include "sparselr/model_io.hpp"
#include "sparselr/operator.hpp"

namespace sparselr {

/// Heisenberg chain with a sparse heavy-tailed transverse field on F = sigma Z.
struct DisorderConfig {
    double mu = 1.0;
    double J = 1.0;
    double a = 0.25;
    double b = 0.5;
    std::optional<double> epsilon;  // default: C (1 + v|t|) (2L + 1)
    int L = 3;
    int n_realizations = 1000;
    std::uint64_t seed = 0;
    std::vector<double> t_grid{0.5};
    int L_exact = 3;

    /// ceil(max{1/mu, 2}).
    int sigma() const;

    /// Throws DomainError on any violated range (0 < a < 1/2, a < b < 1, ...).
    void validate() const;
};

/// Keys: mu, J, a, b, epsilon (optional), L, n_realizations, seed, t_grid, L_exact.
DisorderConfig disorder_config_from(const ConfigNode& node);

/// SplitMix64: a counter-based 64-bit generator. Children are derived by
/// hashing (seed, index), so realization r never depends on scheduling.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

    static std::uint64_t mix(std::uint64_t z);
    static std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

private:
    std::uint64_t state_;
};

/// (1 - u)^{-1/a}, the inverse CDF of 1 - r^{-a}; any a > 0.
double heavy_tail_inverse_cdf(double a, double u);

/// Same, restricted to the admissible tail exponents 0 < a < 1/2.
double sample_heavy_tail(double a, double u);

/// F intersected with [-R, R], ascending.
std::vector<int> field_sites(const DisorderConfig& cfg, int R);

/// One coupling per site of F intersected with [-L-3, L+3], drawn in ascending
/// site order from SplitMix64(child_seed).
std::map<int, double> sample_couplings(const DisorderConfig& cfg, std::uint64_t child_seed);

/// -J sum sigma^j sigma^j + sum_{x in F, |x| <= L} lambda_x sigma^3_x on [-L, L].
DenseOperator build_heisenberg_sparse_field(const DisorderConfig& cfg, const std::map<int, double>& couplings);

/// LR constants of the Heisenberg bond (||Phi|| = 3J).
LRParameters disorder_parameters(const DisorderConfig& cfg);

double default_epsilon(const DisorderConfig& cfg, double t);
double effective_epsilon(const DisorderConfig& cfg, double t);

/// |{x in F, |x| <= L+3 : lambda_x >= eps (2L+1)}| >= (2L+1)^{1-b}.
bool large_deviation_indicator(const std::map<int, double>& couplings, const DisorderConfig& cfg, double epsilon);

/// e^{v|t|} e^{-2 mu L} e^{-(2L+1)^{1-b} ln(2L+1)}.
double disorder_bound(const DisorderConfig& cfg, double t);
double disorder_bound(const LRParameters& p, const DisorderConfig& cfg, double t);

/// Smallest L in [1, L_max] with e^{-(2L+1)^{1-b} ln(2L+1)} < C0.
std::optional<int> smallest_sharper_L(const DisorderConfig& cfg, int L_max = 30);

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

struct DisorderRow {
    int realization = 0;
    std::uint64_t seed_child = 0;
    double t = 0.0;
    bool event = false;
    std::optional<double> exact_norm;
    double bound = 0.0;
    bool applicable = false;
    bool violated = false;
};

struct DisorderSummary {
    double t = 0.0;
    double epsilon = 0.0;
    bool epsilon_default = true;
    std::size_t events = 0;
    double frequency = 0.0;
    WilsonInterval interval;
    std::size_t applicable = 0;
    std::size_t violations = 0;
    /// Event realizations whose exact norm (where computed) sits below the bound.
    std::size_t event_rows_within_bound = 0;
    std::size_t event_rows_with_exact = 0;
};

struct DisorderReport {
    DisorderConfig cfg;
    LRParameters params;
    std::vector<DisorderRow> rows;  // realization-major, then t
    std::vector<DisorderSummary> summaries;
    std::vector<std::string> notes;

    std::size_t violations() const;
};

/// Samples every realization (OpenMP over r, merged by index) and, for
/// L <= L_exact, evaluates ||[tau_t(sigma^3_{-L}), sigma^3_L]|| exactly.
DisorderReport monte_carlo_sweep(const DisorderConfig& cfg);

/// realization,seed_child,t,event,exact_norm,bound,applicable,violated
void write_disorder_csv(const DisorderReport& report, std::ostream& out);

}  // namespace sparselr
