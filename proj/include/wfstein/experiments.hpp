#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wfstein/interpolator.hpp"
#include "wfstein/model_params.hpp"
#include "wfstein/simplex_lattice.hpp"
#include "wfstein/stein.hpp"
#include "wfstein/util.hpp"

namespace wfstein {

struct ExperimentConfig {
  std::vector<double> beta;       // K entries
  int K = 2;
  std::vector<int> N_list;        // strictly increasing
  std::uint64_t family_seed = 2024;
  std::uint64_t mc_seed = 7;
  int quadrature_order = 64;
  std::string output_path = "wfstein_out.csv";

  static ExperimentConfig defaults();
  // Parses the JSON object {"beta": [...], "K": n, "N_list": [...],
  // "family_seed": n, "mc_seed": n, "quadrature_order": n, "output_path": s}.
  // Missing fields keep their defaults; malformed input throws ConfigError.
  static ExperimentConfig from_json_file(const std::string& path);
  void validate() const;  // throws ConfigError
};

// An analytic test-function shape: polynomial members carry their monomial
// expansion over the K-1 coordinates so E h(Z) can use exact moments.
struct FamilyMember {
  std::string id;
  bool polynomial = false;
  std::vector<std::pair<MultiIndex, double>> poly_terms;  // exponents over u
  std::function<double(std::span<const double>)> fn;
};

// The documented family: all monomials u^a with 1 <= ||a||_1 <= 4, five
// seeded random mixtures of them with coefficients in [-1,1], and two smooth
// exponential members.
std::vector<FamilyMember> build_family_specs(int K, std::uint64_t seed);

// A family member restricted to a lattice, certified, and rescaled so its
// class constant equals target_c exactly; `scale` also applies to E h(Z).
struct CertifiedMember {
  FamilyMember spec;
  TestFunction tf;
  double scale = 1.0;
};

CertifiedMember certify_member(const FamilyMember& member,
                               std::shared_ptr<const SimplexLattice> lattice,
                               double target_c = 1.0);

// Restriction + certification of the whole family at lattice spacing delta
// (N = round(1/delta)); class constants normalized to c* = 1.
std::vector<TestFunction> build_test_family(int K, double delta, std::uint64_t seed);

// E h(Z) for a certified member: exact monomial moments for polynomials,
// adaptive-order quadrature otherwise (order doubles until the change is
// below `target_accuracy`).
double family_member_expectation_Z(const CertifiedMember& member,
                                   std::span<const double> beta, int base_order,
                                   double target_accuracy);

struct RateRow {
  int N = 0;
  std::string h_id;
  double E_h_U = 0.0;
  double E_h_Z = 0.0;
  double abs_err = 0.0;
};

struct RateReport {
  std::vector<RateRow> rows;
  std::vector<int> N_list;
  std::vector<double> e_of_N;      // max |E h(U) - E h(Z)| over the family
  double fitted_slope = 0.0;       // log e(N) vs log N
  double scaled_spread = 0.0;      // max e(N)*N / median e(N)*N
};

RateReport rate_study(const ExperimentConfig& cfg);
void write_rate_csv(const RateReport& report, const std::string& path);
// Writes "<path>.summary" with the fitted slope and spread.
void write_rate_summary(const RateReport& report, const std::string& path);

struct CheckRecord {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<CheckRecord> records;
  bool all_pass() const;
};

// Bundles the module invariants: interpolator identities, moment oracles,
// Stein residuals and factor bounds, coupling confidence intervals, and the
// Beta-tail envelope comparison. Individual failures are recorded and the
// suite continues.
VerificationReport run_verification_suite(const ExperimentConfig& cfg);
void write_report_csv(const VerificationReport& report, const std::string& path);

// Interpolator identity records for one (d, delta) pair, against an optional
// replacement weight table (used for harness mutation testing).
std::vector<CheckRecord> interpolator_identity_checks(int d, double delta,
                                                      const WeightKernel& kernel =
                                                          WeightKernel::instance());

// Fitted approximation order for a fixed smooth non-polynomial function
// (expected 4.0 +/- 0.3).
CheckRecord interpolation_order_check();

// Closed-form moments, their enumeration oracles, and the bound envelopes
// over every state of the (N, beta) lattice.
std::vector<CheckRecord> moment_oracle_checks(int N, const std::vector<double>& beta);

// Residuals, series agreement, normalization and factor bounds for the whole
// certified family on one (N, beta) chain.
std::vector<CheckRecord> stein_suite_checks(int N, const std::vector<double>& beta,
                                            std::uint64_t family_seed);

// Ancestry-coupling Monte Carlo against the closed forms. The displayed
// product form (1-1/N) delta^2 N^2 (1-Sigma)^{2t} is exact at t = 1 and is
// checked there; `displayed_form_all_t` additionally asserts it for every
// t <= T, which disagrees with the coupling's compounding recursion.
std::vector<CheckRecord> coupling_checks(int N, const std::vector<double>& beta, int T,
                                         int reps, std::uint64_t seed,
                                         bool displayed_form_all_t = false);

// P(Z_K <= 10K/sqrt(N)) against the explicit envelope, plus tail regularity.
std::vector<CheckRecord> beta_tail_checks(const std::vector<double>& beta,
                                          const std::vector<int>& N_list);

// Dirichlet density normalization and the moment-formula/quadrature cross
// validation.
std::vector<CheckRecord> dirichlet_moment_checks();

// Monte Carlo E[G_Z A f_h(Z)] = 0 for solved Stein instances.
std::vector<CheckRecord> dirichlet_characterization_checks(int N,
                                                           const std::vector<double>& beta,
                                                           int n_samples,
                                                           std::uint64_t seed);

struct GeneratorExpansionStudy {
  std::vector<int> N_list;
  std::vector<double> max_eps;   // per N
  std::vector<double> ratios;    // max_eps[i+1] / max_eps[i]
  std::vector<CheckRecord> records;
};

// Max |A(G_U(A f_h))(x) - delta G_Z A f_h(x)| over a fixed interior sample,
// doubling N; each ratio must land in [0.35, 0.65] (halving +/- 30%). The
// sample region keeps sum x <= min(1 - 10K/sqrt(N), 0.6) so the study runs
// below the N > 100K^2 regime where the strict inner region empties.
GeneratorExpansionStudy generator_expansion_study(const std::vector<double>& beta,
                                                  const std::vector<int>& N_list,
                                                  int samples, std::uint64_t seed);

}  // namespace wfstein
