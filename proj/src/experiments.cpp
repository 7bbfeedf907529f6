#include "wfstein/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "wfstein/dirichlet.hpp"
#include "wfstein/errors.hpp"
#include "wfstein/quadrature.hpp"

namespace wfstein {

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.beta = {2.0, 12.0};
  cfg.K = 2;
  cfg.N_list = {8, 16, 32, 64, 128};
  cfg.family_seed = 2024;
  cfg.mc_seed = 7;
  cfg.quadrature_order = 64;
  cfg.output_path = "rate_study.csv";
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
    ExperimentConfig cfg = defaults();
    if (j.contains("beta")) cfg.beta = j.at("beta").get<std::vector<double>>();
    if (j.contains("K")) cfg.K = j.at("K").get<int>();
    else cfg.K = static_cast<int>(cfg.beta.size());
    if (j.contains("N_list")) cfg.N_list = j.at("N_list").get<std::vector<int>>();
    if (j.contains("family_seed")) cfg.family_seed = j.at("family_seed").get<std::uint64_t>();
    if (j.contains("mc_seed")) cfg.mc_seed = j.at("mc_seed").get<std::uint64_t>();
    if (j.contains("quadrature_order")) cfg.quadrature_order = j.at("quadrature_order").get<int>();
    if (j.contains("output_path")) cfg.output_path = j.at("output_path").get<std::string>();
    cfg.validate();
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (K < 2) throw ConfigError("config: K must be >= 2");
  if (static_cast<int>(beta.size()) != K) throw ConfigError("config: beta must have K entries");
  for (double b : beta) {
    if (!(b > 0.0)) throw ConfigError("config: beta entries must be > 0");
  }
  if (N_list.empty()) throw ConfigError("config: N_list must be non-empty");
  for (std::size_t i = 0; i + 1 < N_list.size(); ++i) {
    if (N_list[i] >= N_list[i + 1]) throw ConfigError("config: N_list must be strictly increasing");
  }
  if (N_list.front() < 1) throw ConfigError("config: N entries must be >= 1");
  if (quadrature_order < 4) throw ConfigError("config: quadrature_order must be >= 4");
}

namespace {

std::string monomial_id(const MultiIndex& a) {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (!first) os << "*";
    os << "u" << (i + 1);
    if (a[i] > 1) os << "^" << a[i];
    first = false;
  }
  return os.str();
}

std::function<double(std::span<const double>)> poly_fn(
    std::vector<std::pair<MultiIndex, double>> terms) {
  return [terms = std::move(terms)](std::span<const double> u) {
    double acc = 0.0;
    for (const auto& [a, coeff] : terms) {
      double term = coeff;
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (int r = 0; r < a[i]; ++r) term *= u[i];
      }
      acc += term;
    }
    return acc;
  };
}

}  // namespace

std::vector<FamilyMember> build_family_specs(int K, std::uint64_t seed) {
  if (K < 2) throw ConfigError("build_family_specs: K must be >= 2");
  const int d = K - 1;
  std::vector<FamilyMember> family;

  auto monomials = multi_indices_up_to(d, 4);
  for (const auto& a : monomials) {
    FamilyMember m;
    m.id = monomial_id(a);
    m.polynomial = true;
    m.poly_terms = {{a, 1.0}};
    m.fn = poly_fn(m.poly_terms);
    family.push_back(std::move(m));
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  for (int mix = 0; mix < 5; ++mix) {
    FamilyMember m;
    m.id = "mix" + std::to_string(mix);
    m.polynomial = true;
    for (const auto& a : monomials) m.poly_terms.emplace_back(a, coeff(rng));
    m.fn = poly_fn(m.poly_terms);
    family.push_back(std::move(m));
  }

  {
    FamilyMember m;
    m.id = "exp_decay_sum";
    m.fn = [](std::span<const double> u) {
      double total = 0.0;
      for (double v : u) total += v;
      return std::exp(-total);
    };
    family.push_back(std::move(m));
  }
  {
    FamilyMember m;
    m.id = "exp_weighted";
    m.fn = [](std::span<const double> u) {
      double total = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) total += 0.5 * (i + 1.0) * u[i];
      return std::exp(-total);
    };
    family.push_back(std::move(m));
  }
  return family;
}

CertifiedMember certify_member(const FamilyMember& member,
                               std::shared_ptr<const SimplexLattice> lattice,
                               double target_c) {
  GridFunction raw = GridFunction::from_fn(lattice, member.fn);
  TestFunction certified = certify_test_function(std::move(raw));
  double scale = certified.class_constant > 0.0 ? target_c / certified.class_constant : 1.0;
  return CertifiedMember{member, certify_test_function(certified.h.scaled(scale)), scale};
}

std::vector<TestFunction> build_test_family(int K, double delta, std::uint64_t seed) {
  int N = static_cast<int>(std::lround(1.0 / delta));
  if (N < 1 || std::abs(delta * N - 1.0) > 1e-9) {
    throw ConfigError("build_test_family: delta must be 1/N");
  }
  // Certification touches only the lattice geometry; a zero-mutation carrier
  // supplies N and K without constraining them.
  auto lattice = SimplexLattice::enumerate(
      ModelParams::with_mutation_probs(N, std::vector<double>(K, 0.0)));
  std::vector<TestFunction> out;
  for (const auto& member : build_family_specs(K, seed)) {
    out.push_back(certify_member(member, lattice, 1.0).tf);
  }
  return out;
}

double family_member_expectation_Z(const CertifiedMember& member,
                                   std::span<const double> beta, int base_order,
                                   double target_accuracy) {
  if (member.spec.polynomial) {
    DirichletLaw law(std::vector<double>(beta.begin(), beta.end()));
    const int K = law.K();
    double acc = 0.0;
    for (const auto& [a, coeff] : member.spec.poly_terms) {
      MultiIndex full(K, 0);
      for (std::size_t i = 0; i < a.size(); ++i) full[i] = a[i];
      acc += coeff * monomial_moment(law, full);
    }
    return member.scale * acc;
  }
  int order = base_order;
  double prev = dirichlet_expectation(beta, member.spec.fn, order);
  while (order < 1024) {
    int next_order = order * 2;
    double next = dirichlet_expectation(beta, member.spec.fn, next_order);
    if (std::abs(next - prev) < target_accuracy) return member.scale * next;
    prev = next;
    order = next_order;
  }
  return member.scale * prev;
}

RateReport rate_study(const ExperimentConfig& cfg) {
  cfg.validate();
  RateReport report;
  report.N_list = cfg.N_list;
  auto family = build_family_specs(cfg.K, cfg.family_seed);

  for (int N : cfg.N_list) {
    try {
      auto params = ModelParams::wright_fisher(N, cfg.beta);
      auto lattice = SimplexLattice::enumerate(params);
      auto kernel = TransitionKernel::build(lattice);
      auto pi = stationary_distribution(kernel);

      double eN = 0.0;
      for (const auto& member : family) {
        CertifiedMember cm = certify_member(member, lattice, 1.0);
        double e_u = stationary_expectation(pi, cm.tf.h);
        double e_z = family_member_expectation_Z(cm, cfg.beta, cfg.quadrature_order, 1e-11);
        RateRow row;
        row.N = N;
        row.h_id = member.id;
        row.E_h_U = e_u;
        row.E_h_Z = e_z;
        row.abs_err = std::abs(e_u - e_z);
        eN = std::max(eN, row.abs_err);
        report.rows.push_back(std::move(row));
      }
      report.e_of_N.push_back(eN);
    } catch (const CapacityError& e) {
      throw CapacityError("rate_study at N=" + std::to_string(N) + ": " + e.what());
    } catch (const SingularityError& e) {
      throw SingularityError("rate_study at N=" + std::to_string(N) + ": " + e.what());
    } catch (const DomainError& e) {
      throw ConfigError("rate_study at N=" + std::to_string(N) + ": " + e.what());
    }
  }

  std::vector<double> log_n, log_e;
  for (std::size_t i = 0; i < report.e_of_N.size(); ++i) {
    log_n.push_back(std::log(static_cast<double>(cfg.N_list[i])));
    log_e.push_back(std::log(std::max(report.e_of_N[i], 1e-300)));
  }
  if (log_n.size() >= 2) report.fitted_slope = least_squares(log_n, log_e).slope;

  std::vector<double> scaled;
  for (std::size_t i = 0; i < report.e_of_N.size(); ++i) {
    scaled.push_back(report.e_of_N[i] * static_cast<double>(cfg.N_list[i]));
  }
  if (!scaled.empty()) {
    std::vector<double> sorted = scaled;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    if (sorted.size() % 2 == 0) median = 0.5 * (median + sorted[sorted.size() / 2 - 1]);
    report.scaled_spread = *std::max_element(scaled.begin(), scaled.end()) / median;
  }
  return report;
}

void write_rate_csv(const RateReport& report, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw ConfigError("write_rate_csv: cannot open " + path);
  std::fprintf(out, "N,h_id,E_h_U,E_h_Z,abs_err\n");
  for (const auto& row : report.rows) {
    std::fprintf(out, "%d,%s,%.17g,%.17g,%.17g\n", row.N, row.h_id.c_str(), row.E_h_U,
                 row.E_h_Z, row.abs_err);
  }
  std::fclose(out);
}

void write_rate_summary(const RateReport& report, const std::string& path) {
  std::FILE* out = std::fopen((path + ".summary").c_str(), "w");
  if (!out) throw ConfigError("write_rate_summary: cannot open " + path + ".summary");
  std::fprintf(out, "fitted_slope,%.17g\n", report.fitted_slope);
  std::fprintf(out, "max_eN_times_N_over_median,%.17g\n", report.scaled_spread);
  for (std::size_t i = 0; i < report.e_of_N.size(); ++i) {
    std::fprintf(out, "e_of_N,%d,%.17g\n", report.N_list[i], report.e_of_N[i]);
  }
  std::fclose(out);
}

bool VerificationReport::all_pass() const {
  for (const auto& r : records) {
    if (!r.pass) return false;
  }
  return true;
}

void write_report_csv(const VerificationReport& report, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) throw ConfigError("write_report_csv: cannot open " + path);
  std::fprintf(out, "name,value,bound,verdict\n");
  for (const auto& r : report.records) {
    std::fprintf(out, "%s,%.17g,%.17g,%s\n", r.name.c_str(), r.value, r.bound,
                 r.pass ? "pass" : "fail");
  }
  std::fclose(out);
}

}  // namespace wfstein
