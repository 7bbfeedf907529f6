#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "wfstein/simplex_lattice.hpp"

namespace wfstein {

// One transition row from state u: the multinomial law with trial
// probabilities q_j = u_j (1 - Sigma) + p_j (j < K) and q_K = 1 - sum q_j,
// marginalized to the first K-1 counts. Computed in log space.
std::vector<double> transition_row(const SimplexLattice& lattice, std::size_t state_idx);
std::vector<double> transition_row(const SimplexLattice& lattice,
                                   std::span<const int> counts);

// Dense row-stochastic transition matrix over the lattice states. Row
// construction runs in parallel; the built object is immutable.
class TransitionKernel {
 public:
  static TransitionKernel build(std::shared_ptr<const SimplexLattice> lattice);

  const SimplexLattice& lattice() const { return *lattice_; }
  std::shared_ptr<const SimplexLattice> lattice_ptr() const { return lattice_; }
  const Eigen::MatrixXd& matrix() const { return P_; }
  std::size_t size() const { return static_cast<std::size_t>(P_.rows()); }

 private:
  TransitionKernel(std::shared_ptr<const SimplexLattice> lattice, Eigen::MatrixXd P)
      : lattice_(std::move(lattice)), P_(std::move(P)) {}

  std::shared_ptr<const SimplexLattice> lattice_;
  Eigen::MatrixXd P_;
};

struct StationaryDistribution {
  std::shared_ptr<const SimplexLattice> lattice;
  Eigen::VectorXd pi;
  double residual = 0.0;  // || pi P - pi ||_1
};

// Solves pi P = pi, sum pi = 1 by direct LU (one balance equation replaced by
// the normalization row) plus one step of iterative refinement. Throws
// SingularityError if the system is numerically rank-deficient.
StationaryDistribution stationary_distribution(const TransitionKernel& kernel);

// Power-iteration cross-check: distribution after `steps` kernel applications
// from the uniform start.
Eigen::VectorXd power_iteration_distribution(const TransitionKernel& kernel, int steps);

// Forward simulation by sequential conditional-binomial multinomial sampling;
// returns T+1 count vectors, deterministic given seed. Works directly from
// params (no state enumeration), so Sigma = 0 is admissible here.
std::vector<LatticeState> simulate(const ModelParams& params, const LatticeState& u0,
                                   int T, std::uint64_t seed);

// G_U f(u) = E_u f(U(1)) - f(u).
double apply_generator_U(const TransitionKernel& kernel, const GridFunction& f,
                         std::size_t state_idx);
Eigen::VectorXd apply_generator_U(const TransitionKernel& kernel, const GridFunction& f);

// E_pi[f]
double stationary_expectation(const StationaryDistribution& pi, const GridFunction& f);

}  // namespace wfstein
