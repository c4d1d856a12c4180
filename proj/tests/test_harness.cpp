#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "test_support.hpp"

#include "sparselr/error.hpp"
#include "sparselr/harness.hpp"

using namespace sparselr;
namespace fs = std::filesystem;

namespace {

const char* kHeisenbergL4 = R"({
  "model": {
    "L": 4, "D": 2, "heisenberg_J": 1.0,
    "impurities": [{"site": 0, "coupling": 50, "eigenvalues": [1, -1],
                    "projectors": [[1,0,0,0], [0,0,0,1]]}]
  },
  "mu": 1.0,
  "A": {"site": -4, "op": "sz"},
  "B": {"site": 4, "op": "sz"},
  "t_grid": [0, 0.25, 0.5, 1],
  "bounds": ["apriori", "main", "corollary", "single_impurity"]
})";

ExperimentConfig experiment(const std::string& text) {
    const ConfigDocument doc = ConfigDocument::parse(text, "exp.json");
    return experiment_from_config(ConfigNode(doc));
}

std::string verify_csv(const ExperimentConfig& cfg) {
    std::ostringstream os;
    write_verify_csv(run_verify(cfg), os);
    return os.str();
}

std::string parse_error(const std::string& text) {
    try {
        experiment(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / "sparselr_test_harness";
    fs::create_directories(d);
    return d;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream(p) << text;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SPARSELR_CLI) + " " + args + " 2>/dev/null >/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("observables") {
    const ChainGeometry g(2, 2);
    const ObservableSpec sz = named_observable("sz", -2, g);
    CHECK(sz.op.support() == SiteSupport::site(-2));
    CHECK(sz.op.matrix() == pauli::sz());
    CHECK_THROWS_AS(named_observable("sz", 3, g), RangeError);
    CHECK_THROWS(named_observable("sw", 0, g));
    CHECK_THROWS_AS(named_observable("sz", 0, ChainGeometry(1, 3)), PreconditionError);

    const ConfigDocument doc = ConfigDocument::parse(R"({"sites": [0, 1], "matrix": [1,0,0,0, 0,1,0,0, 0,0,1,0, 0,0,0,[0,1]]})");
    const ObservableSpec m = observable_from_config(ConfigNode(doc), g);
    CHECK(m.op.support() == SiteSupport(0, 1));
    CHECK(m.op.matrix()(3, 3) == cplx(0, 1));
}

TEST_CASE("verify at t = 0 is exact and passes") {
    ExperimentConfig cfg = experiment(kHeisenbergL4);
    cfg.t_grid = {0.0};
    const VerifyResult r = run_verify(cfg);
    REQUIRE(r.records.size() == 1);
    const ExperimentRecord& rec = r.records[0];
    CHECK(rec.exact_norm == 0.0);
    CHECK(rec.dAB == 8);
    CHECK(rec.N == 1);
    CHECK(rec.apriori.applicable);
    CHECK(rec.apriori.value == 0.0);
    CHECK(rec.main.applicable);
    CHECK(rec.main.value == 0.0);
    CHECK(rec.corollary.value > 0.0);
    CHECK(rec.violations().empty());
    CHECK(r.exit_code() == 0);
}

TEST_CASE("verify on the impurity chain") {
    const ExperimentConfig cfg = experiment(kHeisenbergL4);
    const VerifyResult r = run_verify(cfg);
    REQUIRE(r.records.size() == 4);
    CHECK_FALSE(r.aborted);
    const LRParameters& p = r.params;
    for (const ExperimentRecord& rec : r.records) {
        CHECK(rec.apriori.value == doctest::Approx(apriori_bound(p, rec.t, 8)).epsilon(1e-15));
        CHECK(rec.main.value ==
              doctest::Approx(main_bound(p, 2, SiteSupport::site(-4), SiteSupport::site(4),
                                         cfg.model.imp, rec.t).value)
                  .epsilon(1e-15));
        CHECK(rec.exact_norm <= rec.apriori.value + kViolationTol);
        // the open window (max S_A + 3, min S_B - 3) = (-1, 1) contains 0
        CHECK(rec.single_impurity.applicable);
        CHECK(rec.exact_norm <= rec.single_impurity.value + kViolationTol);
    }
    // rerun: byte-identical CSV
    CHECK(verify_csv(cfg) == verify_csv(cfg));
    const std::string csv = verify_csv(cfg);
    CHECK(csv.substr(0, csv.find('\n')) ==
          "t,dAB,N,exact_norm,apriori,apriori_applicable,main,main_applicable,corollary,corollary_applicable,"
          "single_impurity,single_impurity_applicable,double_commutator_exact,double_commutator,"
          "double_commutator_applicable,violated");

    const nlohmann::json j = verify_json(cfg, r);
    CHECK(j["records"].size() == 4);
    CHECK(j["records"][0].contains("wall_time_ms"));
    CHECK(j["config"]["mu"] == 1.0);
}

TEST_CASE("bounds downgrade to NOT_APPLICABLE") {
    ExperimentConfig cfg = experiment(kHeisenbergL4);
    cfg.A = named_observable("sz", -1, cfg.model.geom);
    cfg.t_grid = {0.5};
    const VerifyResult r = run_verify(cfg);
    CHECK(r.records[0].apriori.applicable);
    CHECK_FALSE(r.records[0].main.applicable);
    CHECK_FALSE(r.records[0].main.reason.empty());

    cfg.A = named_observable("sz", 4, cfg.model.geom);
    const VerifyResult overlap = run_verify(cfg);
    CHECK_FALSE(overlap.records[0].apriori.applicable);
    CHECK(overlap.exit_code() == 0);
}

TEST_CASE("violation detection on a record") {
    ExperimentRecord rec;
    rec.exact_norm = 1.0;
    rec.apriori = {true, true, 0.5, {}};
    REQUIRE(rec.violations().size() == 1);
    CHECK(rec.violations()[0] == BoundKind::apriori);
    rec.apriori.value = 1.0 - 1e-10;
    CHECK(rec.violations().empty());
}

TEST_CASE("experiment parse errors carry line numbers") {
    std::string bad = kHeisenbergL4;
    bad.replace(bad.find("\"t_grid\": [0, 0.25, 0.5, 1]"), 27, "\"t_grid\": []");
    CHECK(parse_error(bad).find("line 10") != std::string::npos);

    std::string bad_bound = kHeisenbergL4;
    bad_bound.replace(bad_bound.find("\"corollary\""), 11, "\"tighter\"");
    CHECK(parse_error(bad_bound).find("unknown bound") != std::string::npos);

    std::string far = kHeisenbergL4;
    far.replace(far.find("\"site\": 4, \"op\""), 9, "\"site\": 9");
    const std::string msg = parse_error(far);
    CHECK(msg.find("line 9") != std::string::npos);

    std::string degenerate = kHeisenbergL4;
    degenerate.replace(degenerate.find("[1, -1]"), 7, "[1, 1]");
    CHECK(parse_error(degenerate).find("distinct") != std::string::npos);
}

TEST_CASE("identities: zero interaction gives zero residuals") {
    IdentitiesConfig cfg{ModelDescription{ChainGeometry(3, 2), NNInteraction(2),
                                          ImpuritySpec({testing::sz_impurity(0, 5.0)})}};
    cfg.approx_samples = 3;
    const IdentitiesReport rep = run_identities(cfg);
    CHECK(rep.all_passed());
    CHECK(rep.exit_code() == 0);
    for (const IdentityResult& r : rep.results) {
        INFO(r.name << " " << r.detail);
        CHECK(r.residual == 0.0);
    }
}

TEST_CASE("identities on a random chain") {
    SplitMix64 rng(17);
    const ChainGeometry g(3, 2);
    IdentitiesConfig cfg{ModelDescription{g, testing::random_interaction(g, rng),
                                          ImpuritySpec({testing::random_gap2_impurity(0, 1.0, rng)})}};
    cfg.approx_samples = 5;
    const IdentitiesReport rep = run_identities(cfg);
    for (const IdentityResult& r : rep.results) {
        INFO(r.name << " " << r.detail << " " << r.residual << " " << r.error);
        CHECK(r.passed);
    }
    std::ostringstream os;
    write_identities_csv(rep, os);
    CHECK(os.str().rfind("identity,detail,residual,threshold,passed,error\n", 0) == 0);
}

TEST_CASE("identities: geometry failures are per identity") {
    SplitMix64 rng(18);
    const ChainGeometry g(3, 2);
    IdentitiesConfig cfg{ModelDescription{g, testing::random_interaction(g, rng),
                                          ImpuritySpec({testing::random_gap2_impurity(3, 1.0, rng)})}};
    cfg.site = 3;
    cfg.approx_samples = 2;
    const IdentitiesReport rep = run_identities(cfg);
    CHECK_FALSE(rep.all_passed());
    CHECK(rep.exit_code() == 1);
    bool approx_ran = false;
    for (const IdentityResult& r : rep.results) {
        if (r.name == "conditional_expectation_approximation") approx_ran = r.passed;
        else CHECK_FALSE(r.error.empty());
    }
    CHECK(approx_ran);
}

TEST_CASE("constants table") {
    std::ostringstream os;
    write_constants_csv({constants_row(1.0, 3.0, 2)}, os);
    const std::string s = os.str();
    CHECK(s.rfind("mu,phi_norm,D,c_mu,K_mu,C0,v,C_thm31,C_mu_lem44,series_radius\n", 0) == 0);
    CHECK(s.find("\n1,3,2,") != std::string::npos);
    const ConstantsRow row = constants_row(1.0, 3.0, 2);
    CHECK(row.C_thm31 == main_constant_C(row.params, 2));
}

TEST_CASE("command line") {
    const fs::path dir = scratch_dir();
    std::string cfg = kHeisenbergL4;
    cfg.replace(cfg.find("\"t_grid\": [0, 0.25, 0.5, 1]"), 27, "\"t_grid\": [0, 0.25]");
    write_file(dir / "exp.json", cfg);
    const std::string out = (dir / "out.csv").string();
    CHECK(run_cli("--config " + (dir / "exp.json").string() + " --out " + out + " verify") == 0);
    CHECK(fs::exists(dir / "out.csv"));
    CHECK(fs::exists(dir / "out.json"));
    std::ifstream first(out);
    std::stringstream a;
    a << first.rdbuf();
    CHECK(run_cli("--threads 2 --config " + (dir / "exp.json").string() + " --out " + out + " verify") == 0);
    std::ifstream second(out);
    std::stringstream b;
    b << second.rdbuf();
    CHECK(a.str() == b.str());

    write_file(dir / "broken.json", "{\n  \"mu\": 1,\n  oops\n}");
    CHECK(run_cli("--config " + (dir / "broken.json").string() + " verify") == 1);
    CHECK(run_cli("verify") == 1);

    write_file(dir / "dis.json", R"({"L": 2, "n_realizations": 10, "seed": 3, "t_grid": [0.5]})");
    CHECK(run_cli("--config " + (dir / "dis.json").string() + " --out " + (dir / "dis.csv").string() +
                  " disorder") == 0);
    CHECK(run_cli("--config " + (dir / "dis.json").string() + " --seed 4 disorder") == 0);
    CHECK(run_cli("constants --mu 0.5 1 --phi-norm 1 --D 2 3") == 0);
    CHECK(run_cli("constants --mu 0") == 1);
}
