// wfstein: chain / limit-law verification experiments from the command line.
//
// Subcommands: stationary, stein-solve, interp-verify, moments-verify,
// coupling-sim, rate-study, verify-all. A JSON config (--config) supplies the
// shared experiment parameters; --out and --seed override its fields.
// Exit codes: 0 success, 1 failed verification, 2 configuration error.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "wfstein/dirichlet.hpp"
#include "wfstein/errors.hpp"
#include "wfstein/experiments.hpp"
#include "wfstein/moments.hpp"
#include "wfstein/stein.hpp"
#include "wfstein/wf_kernel.hpp"

namespace {

using namespace wfstein;

struct GlobalOptions {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

ExperimentConfig load_config(const GlobalOptions& g) {
  ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig::defaults()
                                               : ExperimentConfig::from_json_file(g.config_path);
  if (!g.out_path.empty()) cfg.output_path = g.out_path;
  if (g.seed_set) {
    cfg.mc_seed = g.seed;
    cfg.family_seed = g.seed;
  }
  cfg.validate();
  return cfg;
}

int run_stationary(const ExperimentConfig& cfg, int N) {
  auto params = ModelParams::wright_fisher(N, cfg.beta);
  auto lattice = SimplexLattice::enumerate(params);
  auto kernel = TransitionKernel::build(lattice);
  auto pi = stationary_distribution(kernel);

  std::FILE* out = std::fopen(cfg.output_path.c_str(), "w");
  if (!out) throw ConfigError("stationary: cannot open " + cfg.output_path);
  std::fprintf(out, "index");
  for (int i = 0; i < params.dim(); ++i) std::fprintf(out, ",count%d", i + 1);
  std::fprintf(out, ",pi\n");
  for (std::size_t i = 0; i < lattice->size(); ++i) {
    std::fprintf(out, "%zu", i);
    for (int c : lattice->state(i).counts) std::fprintf(out, ",%d", c);
    std::fprintf(out, ",%.17g\n", pi.pi(static_cast<Eigen::Index>(i)));
  }
  std::fclose(out);
  std::printf("states=%zu residual_l1=%.3e -> %s\n", lattice->size(), pi.residual,
              cfg.output_path.c_str());
  return 0;
}

int run_stein_solve(const ExperimentConfig& cfg, int N, const std::string& h_id) {
  auto params = ModelParams::wright_fisher(N, cfg.beta);
  auto lattice = SimplexLattice::enumerate(params);
  auto kernel = TransitionKernel::build(lattice);
  auto pi = stationary_distribution(kernel);

  auto family = build_family_specs(cfg.K, cfg.family_seed);
  const FamilyMember* member = nullptr;
  for (const auto& m : family) {
    if (m.id == h_id) member = &m;
  }
  if (!member) {
    std::string known;
    for (const auto& m : family) known += m.id + " ";
    throw ConfigError("stein-solve: unknown h id '" + h_id + "'; family: " + known);
  }
  CertifiedMember cm = certify_member(*member, lattice, 1.0);
  SteinSolution sol = solve_stein(kernel, pi, cm.tf);

  std::FILE* out = std::fopen(cfg.output_path.c_str(), "w");
  if (!out) throw ConfigError("stein-solve: cannot open " + cfg.output_path);
  std::fprintf(out, "index,h,f\n");
  for (std::size_t i = 0; i < lattice->size(); ++i) {
    std::fprintf(out, "%zu,%.17g,%.17g\n", i, sol.h[i], sol.f[i]);
  }
  std::fclose(out);
  std::printf("h=%s certified_c=%.6g residual=%.3e B1..B4 = %.6g %.6g %.6g %.6g -> %s\n",
              h_id.c_str(), cm.tf.class_constant, sol.residual, sol.factors[0],
              sol.factors[1], sol.factors[2], sol.factors[3], cfg.output_path.c_str());
  return 0;
}

int report_and_exit(const VerificationReport& report, const std::string& out_path) {
  write_report_csv(report, out_path);
  int failures = 0;
  for (const auto& r : report.records) {
    if (!r.pass) {
      std::printf("FAIL %s value=%.6g bound=%.6g\n", r.name.c_str(), r.value, r.bound);
      ++failures;
    }
  }
  std::printf("%zu checks, %d failures -> %s\n", report.records.size(), failures,
              out_path.c_str());
  return failures == 0 ? 0 : 1;
}

int run_interp_verify(const ExperimentConfig& cfg) {
  VerificationReport report;
  for (int N : {8, 32}) {
    for (int d : {1, 2}) {
      for (auto& r : interpolator_identity_checks(d, 1.0 / N)) report.records.push_back(r);
    }
  }
  report.records.push_back(interpolation_order_check());
  return report_and_exit(report, cfg.output_path);
}

int run_moments_verify(const ExperimentConfig& cfg) {
  VerificationReport report;
  for (const auto& [N, beta] :
       std::vector<std::pair<int, std::vector<double>>>{{4, {1.0, 1.0}},
                                                        {6, {2.0, 3.0}},
                                                        {6, {2.0, 3.0, 5.0}}}) {
    for (auto& r : moment_oracle_checks(N, beta)) report.records.push_back(r);
  }
  return report_and_exit(report, cfg.output_path);
}

int run_coupling_sim(const ExperimentConfig& cfg, int N, int T, int reps, int tagged) {
  auto params = ModelParams::wright_fisher(N, cfg.beta);
  auto est = ancestry_coupling_sim(params, tagged, T, reps, cfg.mc_seed);

  std::FILE* out = std::fopen(cfg.output_path.c_str(), "w");
  if (!out) throw ConfigError("coupling-sim: cannot open " + cfg.output_path);
  std::fprintf(out, "t,EV1,EV1_se,EV1_closed_form");
  if (tagged == 2) std::fprintf(out, ",EN2V1V2,EN2V1V2_se,EN2V1V2_recursion");
  std::fprintf(out, "\n");
  for (int t = 0; t <= T; ++t) {
    double closed = params.delta * std::pow(1.0 - params.Sigma, t);
    std::fprintf(out, "%d,%.17g,%.17g,%.17g", t, est.mean_v1[t], est.se_v1[t], closed);
    if (tagged == 2) {
      std::fprintf(out, ",%.17g,%.17g,%.17g", est.mean_n2v1v2[t], est.se_n2v1v2[t],
                   coupling_product_moment(params, t));
    }
    std::fprintf(out, "\n");
  }
  std::fclose(out);
  std::printf("coupling-sim N=%d T=%d reps=%d -> %s\n", N, T, reps, cfg.output_path.c_str());
  return 0;
}

int run_rate_study(const ExperimentConfig& cfg) {
  RateReport report = rate_study(cfg);
  write_rate_csv(report, cfg.output_path);
  write_rate_summary(report, cfg.output_path);
  std::printf("rate-study: fitted_slope=%.4f max(eN*N)/median=%.3f -> %s\n",
              report.fitted_slope, report.scaled_spread, cfg.output_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wright-Fisher chain / Dirichlet limit verification toolkit"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config_path, "JSON experiment config");
  app.add_option("--out", g.out_path, "output path override");
  auto* seed_opt = app.add_option("--seed", g.seed, "seed override");

  int N = 0;
  std::string h_id = "u1";
  int T = 20, reps = 100000, tagged = 2;

  auto* c_stationary = app.add_subcommand("stationary", "exact stationary distribution");
  c_stationary->add_option("--N", N, "population size")->required();

  auto* c_stein = app.add_subcommand("stein-solve", "solve the balance equation for one h");
  c_stein->add_option("--N", N, "population size")->required();
  c_stein->add_option("--h-id", h_id, "family member id (see build_test_family ids)");

  auto* c_interp = app.add_subcommand("interp-verify", "interpolator identity suite");
  auto* c_moments = app.add_subcommand("moments-verify", "moment oracle suite");

  auto* c_coupling = app.add_subcommand("coupling-sim", "ancestry coupling Monte Carlo");
  c_coupling->add_option("--N", N, "population size")->required();
  c_coupling->add_option("--T", T, "time horizon");
  c_coupling->add_option("--reps", reps, "replicates");
  c_coupling->add_option("--tagged", tagged, "tagged founders (1 or 2)");

  auto* c_rate = app.add_subcommand("rate-study", "stationary-approximation rate study");
  auto* c_verify = app.add_subcommand("verify-all", "full verification suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    g.seed_set = seed_opt->count() > 0;
    ExperimentConfig cfg = load_config(g);

    if (c_stationary->parsed()) return run_stationary(cfg, N);
    if (c_stein->parsed()) return run_stein_solve(cfg, N, h_id);
    if (c_interp->parsed()) return run_interp_verify(cfg);
    if (c_moments->parsed()) return run_moments_verify(cfg);
    if (c_coupling->parsed()) return run_coupling_sim(cfg, N, T, reps, tagged);
    if (c_rate->parsed()) return run_rate_study(cfg);
    if (c_verify->parsed()) return report_and_exit(run_verification_suite(cfg), cfg.output_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
