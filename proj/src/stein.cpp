#include "wfstein/stein.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "wfstein/dirichlet.hpp"
#include "wfstein/errors.hpp"
#include "wfstein/interpolator.hpp"

namespace wfstein {

TestFunction certify_test_function(GridFunction h) {
  const auto& lattice = h.lattice();
  const int d = h.dim();
  const int N = lattice.params().N;
  const double delta = h.delta();
  double c = 0.0;
  for (int order = 1; order <= 4; ++order) {
    double scale = std::pow(delta, order);
    for (const auto& a : multi_indices_with_order(d, order)) {
      for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
        const auto& counts = lattice.state(idx).counts;
        long long shifted = 0;
        for (int i = 0; i < d; ++i) shifted += counts[i] + a[i];
        if (shifted > N) continue;
        double ratio = std::abs(forward_difference(h, counts, a)) / scale;
        if (ratio > c) c = ratio;
      }
    }
  }
  return TestFunction{std::move(h), c};
}

bool satisfies_class_bound(const GridFunction& h, double c, double rel_tol) {
  TestFunction fresh = certify_test_function(h);
  return fresh.class_constant <= c * (1.0 + rel_tol);
}

SteinSolution solve_stein(const TransitionKernel& kernel, const StationaryDistribution& pi,
                          const TestFunction& h) {
  if (&h.h.lattice() != &kernel.lattice() || pi.lattice.get() != &kernel.lattice()) {
    throw InvalidStateError("solve_stein: kernel, pi and h must share a lattice");
  }
  const auto n = static_cast<Eigen::Index>(kernel.size());

  Eigen::VectorXd hv(n);
  for (Eigen::Index i = 0; i < n; ++i) hv(i) = h.h[static_cast<std::size_t>(i)];
  const double pi_h = pi.pi.dot(hv);
  Eigen::VectorXd g = hv - Eigen::VectorXd::Constant(n, pi_h);

  // (P - I) f = g is rank-deficient by one with constants in the null space;
  // stack the pi-mean row and least-squares solve, then shift the mean out.
  Eigen::MatrixXd A(n + 1, n);
  A.topRows(n) = kernel.matrix() - Eigen::MatrixXd::Identity(n, n);
  A.row(n) = pi.pi.transpose();
  Eigen::VectorXd b(n + 1);
  b.head(n) = g;
  b(n) = 0.0;

  Eigen::VectorXd f = A.colPivHouseholderQr().solve(b);
  if (!f.allFinite()) throw SingularityError("solve_stein: least-squares solve failed");
  f -= Eigen::VectorXd::Constant(n, pi.pi.dot(f));

  SteinSolution sol{h.h, GridFunction(kernel.lattice_ptr(),
                                      std::vector<double>(f.data(), f.data() + n))};
  sol.pi_h = pi_h;
  sol.residual = ((kernel.matrix() * f - f) - g).lpNorm<Eigen::Infinity>();
  sol.pi_f = pi.pi.dot(f);
  for (int i = 1; i <= 4; ++i) sol.factors[i - 1] = sup_difference(sol.f, i);
  if (sol.residual > 1e-10) {
    throw SingularityError("solve_stein: residual above 1e-10");
  }
  return sol;
}

std::array<double, 4> stein_factors(const SteinSolution& sol) {
  std::array<double, 4> out{};
  for (int i = 1; i <= 4; ++i) out[i - 1] = sup_difference(sol.f, i);
  return out;
}

GridFunction stein_series_solution(const TransitionKernel& kernel,
                                   const StationaryDistribution& pi, const GridFunction& h,
                                   double tail_tol, int t_cap, int* steps_used) {
  const auto n = static_cast<Eigen::Index>(kernel.size());
  Eigen::VectorXd hv(n);
  for (Eigen::Index i = 0; i < n; ++i) hv(i) = h[static_cast<std::size_t>(i)];
  double pi_h = pi.pi.dot(hv);

  Eigen::VectorXd term = hv - Eigen::VectorXd::Constant(n, pi_h);  // P^t (h - pi h)
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  const double rate = 1.0 - kernel.lattice().params().Sigma;  // slowest mode
  const double tail_factor = rate / std::max(1e-300, 1.0 - rate);
  int t = 0;
  for (; t < t_cap; ++t) {
    acc += term;
    double norm = term.lpNorm<Eigen::Infinity>();
    if (norm * tail_factor < tail_tol) break;
    term = kernel.matrix() * term;
  }
  if (steps_used) *steps_used = t + 1;
  acc = -acc;
  return GridFunction(kernel.lattice_ptr(), std::vector<double>(acc.data(), acc.data() + n));
}

CouplingEstimate ancestry_coupling_sim(const ModelParams& params, int tagged, int T,
                                       int reps, std::uint64_t seed) {
  if (tagged != 1 && tagged != 2) throw DomainError("ancestry_coupling_sim: tagged must be 1 or 2");
  if (T < 0 || reps < 1) throw DomainError("ancestry_coupling_sim: need T >= 0, reps >= 1");
  const int N = params.N;
  const double delta = params.delta;
  const double keep = 1.0 - params.Sigma;

  // Replicates carry independent derived seeds, so the chunked parallel run
  // is deterministic: per-chunk accumulators merge in chunk order.
  const std::size_t n_chunks = 16;
  std::vector<std::vector<MeanAccumulator>> v1_chunk(n_chunks), prod_chunk(n_chunks);
  for (auto& c : v1_chunk) c.resize(T + 1);
  for (auto& c : prod_chunk) c.resize(T + 1);
  parallel_for_chunks(n_chunks, [&](std::size_t chunk_begin, std::size_t chunk_end) {
    for (std::size_t chunk = chunk_begin; chunk < chunk_end; ++chunk) {
      auto r_begin = static_cast<std::size_t>(reps) * chunk / n_chunks;
      auto r_end = static_cast<std::size_t>(reps) * (chunk + 1) / n_chunks;
      auto& v1 = v1_chunk[chunk];
      auto& prod = prod_chunk[chunk];
      for (std::size_t r = r_begin; r < r_end; ++r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        int c1 = 1;
        int c2 = tagged == 2 ? 1 : 0;
        for (int t = 0; t <= T; ++t) {
          v1[t].add(delta * c1);
          if (tagged == 2) prod[t].add(static_cast<double>(c1) * static_cast<double>(c2));
          if (t == T) break;
          // Joint step: tag-1 descendants, then tag-2 conditioned on the rest.
          double q1 = delta * c1 * keep;
          double q2 = delta * c2 * keep;
          int n1 = 0, n2 = 0;
          if (q1 > 0.0) n1 = std::binomial_distribution<int>(N, std::min(1.0, q1))(rng);
          if (tagged == 2 && q2 > 0.0 && n1 < N) {
            double cond = std::min(1.0, q2 / (1.0 - q1));
            n2 = std::binomial_distribution<int>(N - n1, cond)(rng);
          }
          c1 = n1;
          c2 = n2;
        }
      }
    }
  });
  std::vector<MeanAccumulator> v1(T + 1), prod(T + 1);
  for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
    for (int t = 0; t <= T; ++t) {
      v1[t].merge(v1_chunk[chunk][t]);
      prod[t].merge(prod_chunk[chunk][t]);
    }
  }

  CouplingEstimate out;
  out.mean_v1.resize(T + 1);
  out.se_v1.resize(T + 1);
  for (int t = 0; t <= T; ++t) {
    out.mean_v1[t] = v1[t].mean();
    out.se_v1[t] = v1[t].std_error();
  }
  if (tagged == 2) {
    out.mean_n2v1v2.resize(T + 1);
    out.se_n2v1v2.resize(T + 1);
    for (int t = 0; t <= T; ++t) {
      out.mean_n2v1v2[t] = prod[t].mean();
      out.se_n2v1v2[t] = prod[t].std_error();
    }
  }
  return out;
}

double coupling_product_moment(const ModelParams& params, int t) {
  double keep = 1.0 - params.Sigma;
  double step = (1.0 - params.delta) * keep * keep;
  return std::pow(step, t);
}

GeneratorExpansion generator_expansion_residual(const TransitionKernel& kernel,
                                                const SteinSolution& sol,
                                                std::span<const double> x,
                                                bool require_paper_domain) {
  const auto& lattice = kernel.lattice();
  if (&sol.f.lattice() != &lattice) {
    throw InvalidStateError("generator_expansion_residual: mismatched lattices");
  }
  const ModelParams& params = lattice.params();
  const int d = params.dim();
  const double delta = params.delta;
  if (static_cast<int>(x.size()) != d) {
    throw DomainError("generator_expansion_residual: point has wrong dimension");
  }

  if (require_paper_domain) {
    if (params.N <= 100 * params.K * params.K) {
      throw DomainError("generator_expansion_residual: requires N > 100 K^2");
    }
    // Conv(S_N) = { x >= 0, sum x <= delta * M } with M the inner count limit.
    long long limit = lattice.inner_region_count_limit();
    double total = 0.0;
    for (double xi : x) {
      if (xi < -1e-12) throw DomainError("generator_expansion_residual: x outside Conv(S_N)");
      total += xi;
    }
    if (limit < 0 || total > delta * static_cast<double>(limit) + 1e-12) {
      throw DomainError("generator_expansion_residual: x outside Conv(S_N)");
    }
  }

  // A f_h at every state of S (the interpolation identity makes these the
  // f_h values, evaluated through the interpolant as the definition reads).
  const std::size_t n = lattice.size();
  Eigen::VectorXd a_f(static_cast<Eigen::Index>(n));
  {
    std::vector<double> y(d);
    for (std::size_t idx = 0; idx < n; ++idx) {
      const auto& tc = lattice.state(idx).counts;
      for (int j = 0; j < d; ++j) y[j] = delta * tc[j];
      a_f(static_cast<Eigen::Index>(idx)) = eval_interpolant(sol.f, y);
    }
  }

  // G_U(A f_h) at the 5^d outer stencil states, all of which must lie in S.
  auto g_u_fn = [&](std::span<const int> counts) -> double {
    auto idx = lattice.find(counts);
    if (!idx) {
      throw DomainError(
          "generator_expansion_residual: an outer stencil state leaves S; move x inward");
    }
    auto v = static_cast<Eigen::Index>(*idx);
    return kernel.matrix().row(v).dot(a_f) - a_f(v);
  };
  GeneratorExpansion out;
  out.lhs = eval_interpolant(g_u_fn, x, delta);

  std::vector<double> grad(d), hess(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    MultiIndex a(d, 0);
    a[i] = 1;
    grad[i] = eval_derivative(sol.f, x, a);
    for (int j = 0; j < d; ++j) {
      MultiIndex ah(d, 0);
      ah[i] += 1;
      ah[j] += 1;
      hess[static_cast<std::size_t>(i) * d + j] = eval_derivative(sol.f, x, ah);
    }
  }
  out.rhs = delta * apply_generator_Z(params, grad, hess, x);
  out.eps = out.lhs - out.rhs;
  return out;
}

}  // namespace wfstein
