#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "wfstein/errors.hpp"
#include "wfstein/experiments.hpp"

using namespace wfstein;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_temp_json(const std::string& name, const std::string& body) {
  std::string path = std::string("test_") + name + ".json";
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("config parsing, defaults, and validation") {
  auto good = write_temp_json("good_cfg", R"({
    "beta": [2.0, 2.0], "N_list": [4, 8], "quadrature_order": 32,
    "output_path": "x.csv", "mc_seed": 5
  })");
  ExperimentConfig cfg = ExperimentConfig::from_json_file(good);
  CHECK(cfg.K == 2);
  CHECK(cfg.N_list == std::vector<int>{4, 8});
  CHECK(cfg.mc_seed == 5);
  CHECK(cfg.family_seed == 2024);  // default retained
  std::remove(good.c_str());

  auto bad_beta = write_temp_json("bad_beta", R"({"beta": [1.0, -2.0], "N_list": [4]})");
  CHECK_THROWS_AS(ExperimentConfig::from_json_file(bad_beta), ConfigError);
  std::remove(bad_beta.c_str());

  auto bad_order = write_temp_json("bad_order", R"({"beta": [1.0, 1.0], "N_list": [8, 4]})");
  CHECK_THROWS_AS(ExperimentConfig::from_json_file(bad_order), ConfigError);
  std::remove(bad_order.c_str());

  auto not_json = write_temp_json("not_json", "{ beta: oops");
  CHECK_THROWS_AS(ExperimentConfig::from_json_file(not_json), ConfigError);
  std::remove(not_json.c_str());

  CHECK_THROWS_AS(ExperimentConfig::from_json_file("definitely_missing.json"), ConfigError);
}

TEST_CASE("family composition and certification") {
  auto family2 = build_family_specs(2, 77);
  std::set<std::string> ids;
  int polynomials = 0;
  for (const auto& m : family2) {
    ids.insert(m.id);
    polynomials += m.polynomial ? 1 : 0;
  }
  CHECK(ids.size() == family2.size());           // unique ids
  CHECK(family2.size() == 4 + 5 + 2);            // monomials, mixtures, smooth
  CHECK(polynomials == 9);
  CHECK(ids.count("u1") == 1);
  CHECK(ids.count("exp_decay_sum") == 1);

  auto family3 = build_family_specs(3, 77);
  CHECK(family3.size() == 14 + 5 + 2);
  CHECK(std::set<std::string>(ids).count("u1") == 1);

  // Certified members carry class constant c* = 1 and pass their own check.
  auto tf = build_test_family(2, 1.0 / 8.0, 77);
  REQUIRE(tf.size() == family2.size());
  for (const auto& t : tf) {
    CHECK(t.class_constant == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(satisfies_class_bound(t.h, t.class_constant, 1e-9));
  }

  // u1 u2 on K = 3 certifies at exactly delta^2 / delta^2 = 1 before scaling.
  auto lattice3 = SimplexLattice::enumerate(ModelParams::wright_fisher(8, {1.0, 1.0, 1.0}));
  for (const auto& m : family3) {
    if (m.id != "u1*u2") continue;
    GridFunction raw = GridFunction::from_fn(lattice3, m.fn);
    TestFunction cert = certify_test_function(std::move(raw));
    CHECK(cert.class_constant == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("rate study on an exchangeable chain keeps the linear member exact") {
  ExperimentConfig cfg;
  cfg.beta = {1.0, 1.0};
  cfg.K = 2;
  cfg.N_list = {4, 8};
  cfg.family_seed = 2024;
  cfg.quadrature_order = 32;
  cfg.output_path = "rate_sym.csv";

  RateReport report = rate_study(cfg);
  bool saw_u1 = false;
  for (const auto& row : report.rows) {
    if (row.h_id != "u1") continue;
    saw_u1 = true;
    // Label symmetry: E_pi U_1 = E Z_1 = 1/2 exactly.
    CHECK(row.abs_err <= 1e-12);
  }
  CHECK(saw_u1);
  CHECK(report.e_of_N.size() == 2);
  for (double e : report.e_of_N) CHECK(e >= 0.0);
}

TEST_CASE("rate study CSV output is deterministic and well-formed") {
  ExperimentConfig cfg;
  cfg.beta = {2.0, 2.0};
  cfg.K = 2;
  cfg.N_list = {4, 8};
  cfg.quadrature_order = 32;
  cfg.output_path = "rate_det.csv";

  RateReport r1 = rate_study(cfg);
  write_rate_csv(r1, "rate_det_a.csv");
  RateReport r2 = rate_study(cfg);
  write_rate_csv(r2, "rate_det_b.csv");
  std::string a = slurp("rate_det_a.csv");
  std::string b = slurp("rate_det_b.csv");
  CHECK(a == b);
  CHECK(a.rfind("N,h_id,E_h_U,E_h_Z,abs_err\n", 0) == 0);
  std::remove("rate_det_a.csv");
  std::remove("rate_det_b.csv");

  write_rate_summary(r1, "rate_det.csv");
  std::string summary = slurp("rate_det.csv.summary");
  CHECK(summary.find("fitted_slope") != std::string::npos);
  std::remove("rate_det.csv.summary");
}

TEST_CASE("rate study annotates the offending N on capacity errors") {
  ExperimentConfig cfg;
  cfg.beta = {2.0, 2.0};
  cfg.K = 2;
  cfg.N_list = {2, 4};  // N = 2: Sigma = 1 violates the scaled regime
  cfg.quadrature_order = 32;
  try {
    rate_study(cfg);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("N=2") != std::string::npos);
  }
}

TEST_CASE("verification report bookkeeping and CSV schema") {
  VerificationReport report;
  report.records.push_back(CheckRecord{"alpha", 0.5, 1.0, true});
  report.records.push_back(CheckRecord{"beta", 2.0, 1.0, false});
  CHECK_FALSE(report.all_pass());
  write_report_csv(report, "report_test.csv");
  std::string text = slurp("report_test.csv");
  CHECK(text.rfind("name,value,bound,verdict\n", 0) == 0);
  CHECK(text.find("alpha,") != std::string::npos);
  CHECK(text.find(",pass") != std::string::npos);
  CHECK(text.find(",fail") != std::string::npos);
  std::remove("report_test.csv");
}

TEST_CASE("generator expansion study shapes") {
  auto study = generator_expansion_study({2.0, 12.0}, {16, 32}, 40, 7);
  REQUIRE(study.max_eps.size() == 2);
  CHECK(study.max_eps[0] > 0.0);
  CHECK(study.max_eps[1] > 0.0);
  REQUIRE(study.ratios.size() == 1);
  CHECK(study.ratios[0] == doctest::Approx(study.max_eps[1] / study.max_eps[0]));
}

}  // TEST_SUITE
