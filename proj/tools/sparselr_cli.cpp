// sparselr: command-line front end.
//
//   sparselr [--config F] [--out F] [--seed N] [--threads N] constants|verify|identities|disorder
//
// CSV goes to --out (stdout when absent); summaries go to stderr.
// Exit status: 0 clean, 1 hard error or failed identity, 2 bound violation.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <omp.h>

#include "CLI11.hpp"
#include "sparselr/csv.hpp"
#include "sparselr/disorder.hpp"
#include "sparselr/error.hpp"
#include "sparselr/harness.hpp"
#include "sparselr/model_io.hpp"

using namespace sparselr;

namespace {

struct Globals {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

std::string parent_dir(const std::string& path) {
    const auto pos = path.find_last_of('/');
    return pos == std::string::npos ? "." : path.substr(0, pos);
}

// Writes through `body` to the --out file, or stdout.
template <class F>
void emit(const std::string& path, F&& body) {
    if (path.empty()) {
        body(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    body(f);
}

std::string json_path_for(const std::string& csv_path) {
    const std::string ext = ".csv";
    if (csv_path.size() > ext.size() && csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0) {
        return csv_path.substr(0, csv_path.size() - ext.size()) + ".json";
    }
    return csv_path + ".json";
}

template <class T>
std::vector<T> scalar_or_list(const ConfigNode& n, T (ConfigNode::*get)() const) {
    std::vector<T> out;
    if (n.is_array()) {
        for (std::size_t i = 0; i < n.size(); ++i) out.push_back((n.at(i).*get)());
    } else {
        out.push_back((n.*get)());
    }
    return out;
}

int run_constants(const Globals& g, std::vector<double> mus, std::vector<double> phis, std::vector<int> Ds) {
    if (!g.config.empty()) {
        const ConfigDocument doc = ConfigDocument::load(g.config);
        const ConfigNode root(doc);
        if (root.has("mu")) mus = scalar_or_list(root.at("mu"), &ConfigNode::as_double);
        if (root.has("phi_norm")) phis = scalar_or_list(root.at("phi_norm"), &ConfigNode::as_double);
        if (root.has("D")) Ds = scalar_or_list(root.at("D"), &ConfigNode::as_int);
    }
    std::vector<ConstantsRow> rows;
    for (double mu : mus)
        for (double phi : phis)
            for (int D : Ds) rows.push_back(constants_row(mu, phi, D));
    emit(g.out, [&](std::ostream& os) { write_constants_csv(rows, os); });
    return 0;
}

int run_verify_cmd(const Globals& g) {
    if (g.config.empty()) throw Error("verify needs --config");
    ExperimentConfig cfg = load_experiment(g.config);
    if (g.seed) cfg.seed = g.seed;
    std::string out = g.out;
    if (out.empty() && cfg.output) {
        out = *cfg.output;
        if (out.front() != '/') out = parent_dir(g.config) + "/" + out;
    }
    const VerifyResult r = run_verify(cfg);
    emit(out, [&](std::ostream& os) { write_verify_csv(r, os); });
    if (!out.empty()) {
        std::ofstream j(json_path_for(out));
        j << verify_json(cfg, r).dump(2) << '\n';
    }
    std::cerr << "verify: " << r.records.size() << " records, C0 = " << csv::format_double(r.params.C0)
              << ", v = " << csv::format_double(r.params.v) << '\n';
    if (r.improvement) {
        const ExperimentRecord& rec = r.records[*r.improvement];
        std::cerr << "improvement: main < apriori at t = " << csv::format_double(rec.t) << " (main "
                  << csv::format_double(rec.main.value) << ", apriori " << csv::format_double(rec.apriori.value)
                  << ")\n";
    } else {
        std::cerr << "improvement: no grid point with main < apriori\n";
    }
    for (const std::string& d : r.diagnostics) std::cerr << d << '\n';
    return r.exit_code();
}

int run_identities_cmd(const Globals& g) {
    if (g.config.empty()) throw Error("identities needs --config");
    const ConfigDocument doc = ConfigDocument::load(g.config);
    IdentitiesConfig cfg = identities_from_config(ConfigNode(doc), parent_dir(g.config));
    if (g.seed) cfg.seed = *g.seed;
    const IdentitiesReport rep = run_identities(cfg);
    emit(g.out, [&](std::ostream& os) { write_identities_csv(rep, os); });
    for (const IdentityResult& r : rep.results) {
        std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << (r.detail.empty() ? "" : " [" + r.detail + "]")
                  << " residual " << csv::format_double(r.residual) << " <= " << csv::format_double(r.threshold)
                  << (r.error.empty() ? "" : " error: " + r.error) << '\n';
    }
    return rep.exit_code();
}

int run_disorder_cmd(const Globals& g) {
    if (g.config.empty()) throw Error("disorder needs --config");
    const ConfigDocument doc = ConfigDocument::load(g.config);
    DisorderConfig cfg = disorder_config_from(ConfigNode(doc));
    if (g.seed) cfg.seed = *g.seed;
    const DisorderReport rep = monte_carlo_sweep(cfg);
    emit(g.out, [&](std::ostream& os) { write_disorder_csv(rep, os); });
    std::cerr << "disorder: L = " << cfg.L << ", sigma = " << cfg.sigma() << ", realizations = "
              << cfg.n_realizations << ", seed = " << cfg.seed << '\n';
    for (const DisorderSummary& s : rep.summaries) {
        std::cerr << "t = " << csv::format_double(s.t) << ": epsilon = " << csv::format_double(s.epsilon)
                  << (s.epsilon_default ? " (default)" : " (configured)") << ", event frequency "
                  << csv::format_double(s.frequency) << " [" << csv::format_double(s.interval.lo) << ", "
                  << csv::format_double(s.interval.hi) << "], applicable " << s.applicable << ", violations "
                  << s.violations << ", event rows within bound " << s.event_rows_within_bound << "/"
                  << s.event_rows_with_exact << '\n';
    }
    for (const std::string& n : rep.notes) std::cerr << "note: " << n << '\n';
    return rep.violations() == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lieb-Robinson bounds with sparse impurities on finite spin chains"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    std::uint64_t seed = 0;
    app.add_option("--config", g.config, "JSON configuration file");
    app.add_option("--out", g.out, "CSV output path (default: stdout)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--threads", g.threads, "OpenMP threads (default: runtime choice)")->check(CLI::PositiveNumber);

    std::vector<double> mus{1.0}, phis{1.0};
    std::vector<int> Ds{2};
    auto* constants = app.add_subcommand("constants", "tabulate the bound constants");
    constants->add_option("--mu", mus, "decay rate(s)");
    constants->add_option("--phi-norm", phis, "interaction strength(s) ||Phi||");
    constants->add_option("--D", Ds, "on-site dimension(s)");
    auto* verify = app.add_subcommand("verify", "exact commutator norms against the bounds");
    auto* identities = app.add_subcommand("identities", "run the decoupling identity suite");
    auto* disorder = app.add_subcommand("disorder", "heavy-tailed sparse field Monte Carlo");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) g.seed = seed;
    if (g.threads > 0) omp_set_num_threads(g.threads);

    try {
        if (*constants) return run_constants(g, mus, phis, Ds);
        if (*verify) return run_verify_cmd(g);
        if (*identities) return run_identities_cmd(g);
        if (*disorder) return run_disorder_cmd(g);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
