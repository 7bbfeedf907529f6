#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wfstein/model_params.hpp"
#include "wfstein/simplex_lattice.hpp"

namespace wfstein {

// Raw multinomial moment patterns for X ~ Multinomial(N, p).
enum class MultinomialPattern {
  Xi,      // E X_i
  Xi2,     // E X_i^2
  XiXj,    // E X_i X_j,        i != j
  XiXjXk,  // E X_i X_j X_k,    i != j != k
  Xi2Xj,   // E X_i^2 X_j,      i != j
  Xi3,     // E X_i^3
};

// Closed-form moment; indices must be distinct where the pattern requires it
// (IndexCollisionError otherwise). Verified against outcome enumeration in
// the oracle suite.
double multinomial_moment(int N, std::span<const double> p, MultinomialPattern pattern,
                          std::span<const int> idx);

// ubar_i = u_i Sigma - p_i, shared by every conditional-moment formula.
double u_bar(const ModelParams& params, std::span<const int> counts, int i);

// One-step conditional drift b_i(u) = -ubar_i.
double drift(const ModelParams& params, std::span<const int> counts, int i);

// One-step conditional covariance
//   a_ij(u) = ubar_i ubar_j + (1/N)(u_i - ubar_i)(delta_ij - (u_j - ubar_j)).
double diffusion(const ModelParams& params, std::span<const int> counts, int i, int j);

constexpr std::size_t kMomentEnumerationCap = 500'000;

struct ThirdMomentResult {
  double value = 0.0;      // exact E_u prod (U - u) by row enumeration
  double envelope = 0.0;   // (1/N + Sigma)^2
};

ThirdMomentResult third_moment_exact(const SimplexLattice& lattice, std::size_t state_idx,
                                     int i, int j, int k,
                                     std::size_t cap = kMomentEnumerationCap);

// Exact c_iii(u) assembled from the binomial central moments of N U_i:
//   -ubar^3 - (3/N) ubar m (1-m) + (1/N^2) m (1-m)(1-2m),  m = u_i - ubar_i.
double third_moment_iii_closed_form(const ModelParams& params, std::span<const int> counts,
                                    int i);

struct FourthMomentResult {
  double value = 0.0;      // E_u |prod (U - u)|
  double std_error = 0.0;  // 0 when enumerated exactly
  bool exact = true;
  double envelope = 0.0;   // (2/sqrt(N) + Sigma)^4
};

// Exact by enumeration when the lattice fits under `cap`; otherwise Monte
// Carlo over `mc_draws` one-step transitions with the reported standard error.
FourthMomentResult fourth_abs_moment(const SimplexLattice& lattice, std::size_t state_idx,
                                     int i, int j, int k, int l,
                                     std::size_t cap = kMomentEnumerationCap,
                                     int mc_draws = 1'000'000, std::uint64_t seed = 1);

struct BinomialTailResult {
  double exact = 0.0;  // P_u(U_K(1) <= M/N), Binomial(N, u_K - ubar_K) CDF
  double bound = 0.0;  // (M+1) N^M / (Sigma - p_K)^M * (1 - u_K(1-Sigma))^N
};

// Requires Sigma > p_K (DomainError otherwise) and 0 <= M <= N.
BinomialTailResult binomial_tail_bound(const ModelParams& params,
                                       std::span<const int> counts, int M);

struct MomentReport {
  LatticeState state;
  std::vector<double> b;       // drift, size K-1
  std::vector<double> a;       // diffusion, (K-1)^2 row-major
  double c_bound = 0.0;        // (1/N + Sigma)^2
  double dbar_bound = 0.0;     // (2/sqrt N + Sigma)^4
};

MomentReport moment_report(const SimplexLattice& lattice, std::size_t state_idx);

}  // namespace wfstein
