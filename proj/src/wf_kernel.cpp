#include "wfstein/wf_kernel.hpp"

#include <cmath>
#include <random>

#include "wfstein/errors.hpp"
#include "wfstein/util.hpp"

namespace wfstein {

namespace {

// Trial probabilities q_1..q_K of the offspring multinomial from state u.
std::vector<double> trial_probs(const ModelParams& params, std::span<const int> counts) {
  const int K = params.K;
  std::vector<double> q(K);
  double acc = 0.0;
  for (int j = 0; j < K - 1; ++j) {
    double u_j = params.delta * counts[j];
    q[j] = u_j * (1.0 - params.Sigma) + params.p[j];
    acc += q[j];
  }
  q[K - 1] = 1.0 - acc;
  if (q[K - 1] < 0.0) q[K - 1] = 0.0;  // guards 1 ulp of cancellation
  return q;
}

double log_multinomial_pmf(int N, std::span<const int> counts_full,
                           std::span<const double> q) {
  double logp = std::lgamma(static_cast<double>(N) + 1.0);
  for (std::size_t j = 0; j < q.size(); ++j) {
    int c = counts_full[j];
    logp -= std::lgamma(static_cast<double>(c) + 1.0);
    if (c > 0) {
      if (q[j] <= 0.0) return -std::numeric_limits<double>::infinity();
      logp += static_cast<double>(c) * std::log(q[j]);
    }
  }
  return logp;
}

}  // namespace

std::vector<double> transition_row(const SimplexLattice& lattice,
                                   std::span<const int> counts) {
  return transition_row(lattice, lattice.index_of(counts));
}

std::vector<double> transition_row(const SimplexLattice& lattice, std::size_t state_idx) {
  const ModelParams& params = lattice.params();
  const int K = params.K;
  const int N = params.N;
  std::vector<double> q = trial_probs(params, lattice.state(state_idx).counts);

  std::vector<double> row(lattice.size());
  std::vector<int> full(K);
  for (std::size_t y = 0; y < lattice.size(); ++y) {
    const auto& target = lattice.state(y).counts;
    int total = 0;
    for (int j = 0; j < K - 1; ++j) {
      full[j] = target[j];
      total += target[j];
    }
    full[K - 1] = N - total;
    double logp = log_multinomial_pmf(N, full, q);
    row[y] = std::isfinite(logp) ? std::exp(logp) : 0.0;
  }
  return row;
}

TransitionKernel TransitionKernel::build(std::shared_ptr<const SimplexLattice> lattice) {
  const std::size_t n = lattice->size();
  Eigen::MatrixXd P(n, n);
  const SimplexLattice& lat = *lattice;
  parallel_for_chunks(n, [&P, &lat](std::size_t begin, std::size_t end) {
    for (std::size_t u = begin; u < end; ++u) {
      std::vector<double> row = transition_row(lat, u);
      for (std::size_t y = 0; y < row.size(); ++y) {
        P(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(y)) = row[y];
      }
    }
  });
  return TransitionKernel(std::move(lattice), std::move(P));
}

StationaryDistribution stationary_distribution(const TransitionKernel& kernel) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  const Eigen::MatrixXd& P = kernel.matrix();

  Eigen::MatrixXd M = P.transpose() - Eigen::MatrixXd::Identity(n, n);
  M.row(0).setOnes();  // replace one redundant balance equation by sum pi = 1
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = 1.0;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
  // Rank deficiency beyond the replaced balance equation (e.g. an absorbing
  // chain with several stationary laws) surfaces as a vanishing pivot; the
  // ergodic kernels here keep min |U_ii| at order one.
  double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot < 1e-10 * M.cwiseAbs().maxCoeff()) {
    throw SingularityError("stationary_distribution: balance system is rank-deficient");
  }
  Eigen::VectorXd pi = lu.solve(b);
  // One refinement pass tightens the residual to the rounding floor.
  pi += lu.solve(b - M * pi);

  double min_entry = pi.minCoeff();
  if (!pi.allFinite() || min_entry < -1e-9) {
    throw SingularityError("stationary_distribution: solve failed or produced mass < 0");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (pi(i) < 0.0) pi(i) = 0.0;
  }
  pi /= pi.sum();

  StationaryDistribution out;
  out.lattice = kernel.lattice_ptr();
  out.residual = ((P.transpose() * pi) - pi).lpNorm<1>();
  out.pi = std::move(pi);
  if (out.residual > 1e-12) {
    throw SingularityError("stationary_distribution: residual above 1e-12");
  }
  return out;
}

Eigen::VectorXd power_iteration_distribution(const TransitionKernel& kernel, int steps) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int t = 0; t < steps; ++t) {
    v = kernel.matrix().transpose() * v;
    v /= v.sum();
  }
  return v;
}

std::vector<LatticeState> simulate(const ModelParams& params, const LatticeState& u0,
                                   int T, std::uint64_t seed) {
  const int K = params.K;
  const int N = params.N;
  if (static_cast<int>(u0.counts.size()) != K - 1) {
    throw InvalidStateError("simulate: initial state has wrong dimension");
  }
  long long total0 = 0;
  for (int c : u0.counts) {
    if (c < 0) throw InvalidStateError("simulate: negative count");
    total0 += c;
  }
  if (total0 > N) throw InvalidStateError("simulate: counts exceed N");
  if (T < 0) throw DomainError("simulate: T must be >= 0");

  std::mt19937_64 rng(seed);
  std::vector<LatticeState> trajectory;
  trajectory.reserve(static_cast<std::size_t>(T) + 1);
  trajectory.push_back(u0);

  std::vector<int> cur = u0.counts;
  std::vector<int> next(K - 1);
  for (int t = 0; t < T; ++t) {
    std::vector<double> q = trial_probs(params, cur);
    int remaining = N;
    double q_rest = 1.0;
    for (int j = 0; j < K - 1; ++j) {
      int draw = 0;
      if (remaining > 0 && q[j] > 0.0) {
        double cond = std::min(1.0, q[j] / q_rest);
        draw = std::binomial_distribution<int>(remaining, cond)(rng);
      }
      next[j] = draw;
      remaining -= draw;
      q_rest -= q[j];
      if (q_rest <= 0.0) q_rest = 0.0;
    }
    cur = next;
    trajectory.push_back(LatticeState{cur});
  }
  return trajectory;
}

double apply_generator_U(const TransitionKernel& kernel, const GridFunction& f,
                         std::size_t state_idx) {
  if (&f.lattice() != &kernel.lattice()) {
    throw InvalidStateError("apply_generator_U: kernel and f use different lattices");
  }
  if (state_idx >= kernel.size()) {
    throw InvalidStateError("apply_generator_U: state index outside S");
  }
  const Eigen::MatrixXd& P = kernel.matrix();
  double acc = 0.0;
  for (std::size_t y = 0; y < kernel.size(); ++y) {
    acc += P(static_cast<Eigen::Index>(state_idx), static_cast<Eigen::Index>(y)) * f[y];
  }
  return acc - f[state_idx];
}

Eigen::VectorXd apply_generator_U(const TransitionKernel& kernel, const GridFunction& f) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  Eigen::VectorXd fv(n);
  for (Eigen::Index i = 0; i < n; ++i) fv(i) = f[static_cast<std::size_t>(i)];
  return kernel.matrix() * fv - fv;
}

double stationary_expectation(const StationaryDistribution& pi, const GridFunction& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pi.lattice->size(); ++i) {
    acc += pi.pi(static_cast<Eigen::Index>(i)) * f[i];
  }
  return acc;
}

}  // namespace wfstein
