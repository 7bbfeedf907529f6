#include <doctest.h>

#include <cmath>
#include <map>

#include "wfstein/errors.hpp"
#include "wfstein/moments.hpp"
#include "wfstein/wf_kernel.hpp"

using namespace wfstein;

namespace {

std::shared_ptr<const SimplexLattice> lattice_of(int N, std::vector<double> beta) {
  return SimplexLattice::enumerate(ModelParams::wright_fisher(N, std::move(beta)));
}

}  // namespace

TEST_SUITE("wf_kernel") {

TEST_CASE("single-trial transition row") {
  // beta = (0.5, 0.5) at N = 1: p_i = 1/4, Sigma = 1/2.
  auto lattice = lattice_of(1, {0.5, 0.5});
  const auto& params = lattice->params();
  auto row = transition_row(*lattice, lattice->index_of(std::vector<int>{1}));
  // From u = (1): P(y1 = 1) = u1 (1 - Sigma) + p1 = 1 - p2.
  std::size_t idx1 = lattice->index_of(std::vector<int>{1});
  CHECK(row[idx1] == doctest::Approx(1.0 - params.p[1]).epsilon(1e-14));
  double total = row[0] + row[1];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("rows are stochastic and match the closed-form moments") {
  for (const auto& [N, beta] : std::vector<std::pair<int, std::vector<double>>>{
           {6, {1.0, 1.0}}, {5, {2.0, 3.0}}, {6, {2.0, 3.0, 5.0}}}) {
    auto lattice = lattice_of(N, beta);
    const auto& params = lattice->params();
    const int d = params.dim();
    auto kernel = TransitionKernel::build(lattice);
    for (std::size_t u = 0; u < lattice->size(); ++u) {
      double total = kernel.matrix().row(static_cast<Eigen::Index>(u)).sum();
      CHECK(std::abs(total - 1.0) <= 1e-12);
      CHECK(kernel.matrix().row(static_cast<Eigen::Index>(u)).minCoeff() >= 0.0);

      const auto& counts = lattice->state(u).counts;
      for (int i = 0; i < d; ++i) {
        double mean = 0.0;
        for (std::size_t y = 0; y < lattice->size(); ++y) {
          mean += kernel.matrix()(u, y) * params.delta * lattice->state(y).counts[i];
        }
        double expected = params.delta * counts[i] + drift(params, counts, i);
        CHECK(mean == doctest::Approx(expected).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("transition row rejects states outside S") {
  auto lattice = lattice_of(4, {1.0, 1.0});
  CHECK_THROWS_AS(transition_row(*lattice, std::vector<int>{5}), InvalidStateError);
}

TEST_CASE("two-state stationary distribution is the closed form") {
  auto lattice = lattice_of(1, {0.5, 0.5});
  auto kernel = TransitionKernel::build(lattice);
  auto pi = stationary_distribution(kernel);
  // P(0 -> 1) = p1, P(1 -> 0) = p2, so pi(1) = p1/(p1+p2) = 1/2.
  std::size_t idx1 = lattice->index_of(std::vector<int>{1});
  CHECK(pi.pi(static_cast<Eigen::Index>(idx1)) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pi.residual <= 1e-12);
}

TEST_CASE("stationary distribution properties") {
  auto lattice = lattice_of(7, {2.0, 2.0});
  auto kernel = TransitionKernel::build(lattice);
  auto pi = stationary_distribution(kernel);
  CHECK(pi.pi.minCoeff() >= 0.0);
  CHECK(pi.pi.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pi.residual <= 1e-12);

  // Exchangeable types: swapping labels maps count n to N - n.
  for (std::size_t i = 0; i < lattice->size(); ++i) {
    int n = lattice->state(i).counts[0];
    std::size_t mirror = lattice->index_of(std::vector<int>{7 - n});
    CHECK(pi.pi(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(pi.pi(static_cast<Eigen::Index>(mirror))).epsilon(1e-11));
  }
}

TEST_CASE("stationary distribution is label-permutation invariant for K = 3") {
  auto lattice = lattice_of(5, {2.0, 2.0, 2.0});
  auto kernel = TransitionKernel::build(lattice);
  auto pi = stationary_distribution(kernel);
  for (std::size_t i = 0; i < lattice->size(); ++i) {
    const auto& c = lattice->state(i).counts;
    // Swap the first two types.
    std::size_t swapped = lattice->index_of(std::vector<int>{c[1], c[0]});
    CHECK(pi.pi(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(pi.pi(static_cast<Eigen::Index>(swapped))).epsilon(1e-11));
    // Rotate type 1 -> 2 -> 3 -> 1: new counts (n3, n1) with n3 = N - n1 - n2.
    std::size_t rotated = lattice->index_of(std::vector<int>{5 - c[0] - c[1], c[0]});
    CHECK(pi.pi(static_cast<Eigen::Index>(i)) ==
          doctest::Approx(pi.pi(static_cast<Eigen::Index>(rotated))).epsilon(1e-11));
  }
}

TEST_CASE("stationary solve rejects non-ergodic chains") {
  // Without mutation both vertices absorb: the balance system is genuinely
  // rank-deficient and the solver must refuse rather than pick a chain.
  auto lattice = SimplexLattice::enumerate(ModelParams::with_mutation_probs(3, {0.0, 0.0}));
  auto kernel = TransitionKernel::build(lattice);
  CHECK_THROWS_AS(stationary_distribution(kernel), SingularityError);
}

TEST_CASE("power iteration agrees with the direct solve") {
  for (const auto& [N, beta] : std::vector<std::pair<int, std::vector<double>>>{
           {10, {1.0, 1.0}}, {6, {2.0, 3.0, 5.0}}}) {
    auto lattice = lattice_of(N, beta);
    auto kernel = TransitionKernel::build(lattice);
    auto pi = stationary_distribution(kernel);
    auto iterated = power_iteration_distribution(kernel, 10000);
    double tv = 0.5 * (iterated - pi.pi).lpNorm<1>();
    CHECK(tv <= 1e-9);
  }
}

TEST_CASE("simulation basics") {
  auto params = ModelParams::wright_fisher(5, {2.0, 2.0});
  LatticeState u0{{2}};
  auto traj0 = simulate(params, u0, 0, 42);
  REQUIRE(traj0.size() == 1);
  CHECK(traj0[0].counts == u0.counts);

  auto a = simulate(params, u0, 200, 42);
  auto b = simulate(params, u0, 200, 42);
  REQUIRE(a.size() == 201);
  for (std::size_t t = 0; t < a.size(); ++t) CHECK(a[t].counts == b[t].counts);

  // Without mutation a fixed type is absorbing.
  auto pure = ModelParams::with_mutation_probs(6, {0.0, 0.0});
  auto fixed = simulate(pure, LatticeState{{6}}, 50, 9);
  for (const auto& s : fixed) CHECK(s.counts[0] == 6);
  auto lost = simulate(pure, LatticeState{{0}}, 50, 9);
  for (const auto& s : lost) CHECK(s.counts[0] == 0);

  CHECK_THROWS_AS(simulate(params, LatticeState{{7}}, 3, 1), InvalidStateError);
  CHECK_THROWS_AS(simulate(params, LatticeState{{-1}}, 3, 1), InvalidStateError);
  CHECK_THROWS_AS(simulate(params, LatticeState{{1, 1}}, 3, 1), InvalidStateError);
}

TEST_CASE("empirical occupation matches the stationary law") {
  auto lattice = lattice_of(5, {2.0, 2.0});
  auto kernel = TransitionKernel::build(lattice);
  auto pi = stationary_distribution(kernel);
  const auto& params = lattice->params();

  const int steps = 1000000;
  auto traj = simulate(params, LatticeState{{2}}, steps, 2025);
  std::map<int, long long> occupation;
  for (int t = 1; t <= steps; ++t) occupation[traj[t].counts[0]] += 1;

  // Multinomial sampling-error scale; the chain's autocorrelation keeps this
  // a smoke check with a frozen seed rather than a sharp CI.
  for (std::size_t i = 0; i < lattice->size(); ++i) {
    double p = pi.pi(static_cast<Eigen::Index>(i));
    double expected = p * steps;
    double sigma = std::sqrt(steps * p * (1.0 - p));
    double observed = static_cast<double>(occupation[lattice->state(i).counts[0]]);
    CHECK(std::abs(observed - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("generator annihilates constants and reproduces the drift") {
  auto lattice = lattice_of(6, {2.0, 3.0});
  auto kernel = TransitionKernel::build(lattice);
  auto pi = stationary_distribution(kernel);
  const auto& params = lattice->params();

  GridFunction c = GridFunction::from_fn(lattice, [](std::vector<double>) { return 5.5; });
  GridFunction u1 = GridFunction::from_fn(lattice, [](std::vector<double> u) { return u[0]; });
  for (std::size_t idx = 0; idx < lattice->size(); ++idx) {
    CHECK(std::abs(apply_generator_U(kernel, c, idx)) <= 1e-13);
    double expected = drift(params, lattice->state(idx).counts, 0);
    CHECK(apply_generator_U(kernel, u1, idx) == doctest::Approx(expected).epsilon(1e-12));
  }

  // Stationarity: sum_u pi(u) G_U f(u) = 0 for an arbitrary f.
  GridFunction f = GridFunction::from_fn(lattice, [](std::vector<double> u) {
    return std::exp(u[0]) + u[0] * u[0];
  });
  Eigen::VectorXd gf = apply_generator_U(kernel, f);
  CHECK(std::abs(pi.pi.dot(gf)) <= 1e-13);

  CHECK_THROWS_AS(apply_generator_U(kernel, f, lattice->size() + 3), InvalidStateError);
}

}  // TEST_SUITE
