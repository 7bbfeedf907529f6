#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wfstein/model_params.hpp"
#include "wfstein/util.hpp"

namespace wfstein {

// Dirichlet law on the open (K-1)-simplex with parameters beta > 0.
struct DirichletLaw {
  std::vector<double> beta;  // size K
  double s = 0.0;            // sum of beta

  explicit DirichletLaw(std::vector<double> beta_in);
  static DirichletLaw from_params(const ModelParams& params) {
    return DirichletLaw(params.beta);
  }
  int K() const { return static_cast<int>(beta.size()); }
  int dim() const { return K() - 1; }
};

// Density at a strictly interior point x of the (K-1)-simplex, evaluated in
// log space; throws DomainError on boundary or exterior points.
double density(const DirichletLaw& law, std::span<const double> x);

// E prod_i Z_i^{a_i} over all K coordinates (x_K = 1 - sum x_i), via the
// rising-factorial ratio prod_i beta_i^{(a_i)} / s^{(||a||_1)}.
double monomial_moment(const DirichletLaw& law, const MultiIndex& a);

// n independent draws (first K-1 coordinates), Gamma-normalization
// construction; deterministic given seed.
std::vector<std::vector<double>> sample(const DirichletLaw& law, std::uint64_t seed, int n);

// P(Z_K <= t): regularized incomplete beta with parameters (beta_K, s - beta_K).
double beta_tail(const DirichletLaw& law, double t);

// The explicit envelope dominating P(Z_K <= 10K/sqrt(N)):
//   Gamma(s) / (Gamma(s-beta_K) Gamma(beta_K)) * (1/beta_K) * t^{beta_K}
//     * (1 + (1 - 1/sqrt(N))^{-|s - beta_K - 1|}),   t = 10K/sqrt(N).
double beta_tail_envelope(const DirichletLaw& law, int N, int K_types);

// Generator of the Wright-Fisher diffusion applied to caller-supplied
// derivatives of f at x:
//   (1/2) [ sum_{ij} x_i (delta_ij - x_j) hess_ij + sum_i (beta_i - s x_i) grad_i ].
// hess is (K-1)^2 row-major.
double apply_generator_Z(std::span<const double> beta, double s,
                         std::span<const double> grad, std::span<const double> hess,
                         std::span<const double> x);
double apply_generator_Z(const ModelParams& params, std::span<const double> grad,
                         std::span<const double> hess, std::span<const double> x);
double apply_generator_Z(const DirichletLaw& law, std::span<const double> grad,
                         std::span<const double> hess, std::span<const double> x);

}  // namespace wfstein
