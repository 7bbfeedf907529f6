#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wfstein/simplex_lattice.hpp"
#include "wfstein/wf_kernel.hpp"

namespace wfstein {

// Lattice test function with a certified class constant c:
//   |Delta^a h(u)| <= c * delta^{||a||_1}  for 1 <= ||a||_1 <= 4
// over every stencil with u and u + delta*a in S.
struct TestFunction {
  GridFunction h;
  double class_constant = 0.0;
};

// Certifies c by exhaustive enumeration of all in-simplex stencils.
TestFunction certify_test_function(GridFunction h);

// Checks the certified inequality with a small relative tolerance.
bool satisfies_class_bound(const GridFunction& h, double c, double rel_tol = 1e-9);

// Solution of G_U f = h - E_pi h with pi f = 0, plus its certificates.
struct SteinSolution {
  GridFunction h;
  GridFunction f;
  double pi_h = 0.0;                 // E_pi h
  double residual = 0.0;             // max_u |G_U f(u) - (h(u) - pi_h)|
  double pi_f = 0.0;                 // should be ~0
  std::array<double, 4> factors{};   // B_1..B_4 of f
};

// Direct least-squares solve of the singular balance system with the pi f = 0
// normalization (constants span the null space, so the mean is shifted out
// exactly afterwards). Residual above 1e-10 throws SingularityError.
SteinSolution solve_stein(const TransitionKernel& kernel, const StationaryDistribution& pi,
                          const TestFunction& h);

std::array<double, 4> stein_factors(const SteinSolution& sol);

// Truncated-series oracle: -(sum_{t<=T} P^t (h - pi_h)), run until the
// geometric tail estimate drops below tail_tol. Converges to the solve_stein
// representative (both have zero stationary mean).
GridFunction stein_series_solution(const TransitionKernel& kernel,
                                   const StationaryDistribution& pi, const GridFunction& h,
                                   double tail_tol = 1e-10, int t_cap = 200000,
                                   int* steps_used = nullptr);

// Forward ancestry counts of 1 or 2 tagged founders under the common-parent,
// common-mutation coupling: counts C(t) evolve as
//   (C_1, C_2)(t) | C(t-1) ~ Multinomial(N, { delta C_i(t-1) (1 - Sigma) }),
// and V_i(t) = delta * C_i(t). Replicates use independent derived seeds.
struct CouplingEstimate {
  std::vector<double> mean_v1, se_v1;          // E V_1(t), t = 0..T
  std::vector<double> mean_n2v1v2, se_n2v1v2;  // E[N^2 V_1 V_2], empty if tagged == 1
};

CouplingEstimate ancestry_coupling_sim(const ModelParams& params, int tagged, int T,
                                       int reps, std::uint64_t seed);

// Exact E[N^2 V_1(t) V_2(t)] under the coupling: ((1-1/N)(1-Sigma)^2)^t.
double coupling_product_moment(const ModelParams& params, int t);

struct GeneratorExpansion {
  double lhs = 0.0;  // A(G_U(A f_h))(x)
  double rhs = 0.0;  // delta * G_Z A f_h(x)
  double eps = 0.0;  // lhs - rhs
};

// Evaluates G_U(A f_h) at the 5^{K-1} stencil states of x (all must lie in S;
// DomainError otherwise) and interpolates; the comparison term uses analytic
// interpolant derivatives. With require_paper_domain the argument must also
// satisfy x in Conv(S_N) and N > 100 K^2.
GeneratorExpansion generator_expansion_residual(const TransitionKernel& kernel,
                                                const SteinSolution& sol,
                                                std::span<const double> x,
                                                bool require_paper_domain = false);

}  // namespace wfstein
