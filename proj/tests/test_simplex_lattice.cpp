#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "wfstein/errors.hpp"
#include "wfstein/simplex_lattice.hpp"

using namespace wfstein;

namespace {

std::shared_ptr<const SimplexLattice> make_lattice(int N, int K) {
  // Geometry-only lattices; zero mutation keeps every (N, K) admissible.
  return SimplexLattice::enumerate(
      ModelParams::with_mutation_probs(N, std::vector<double>(K, 0.0)));
}

// Pascal-triangle binomial, independent of the library helper.
long long pascal(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::vector<std::vector<long long>> c(n + 1, std::vector<long long>(n + 1, 0));
  for (int i = 0; i <= n; ++i) {
    c[i][0] = 1;
    for (int j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
  }
  return c[n][k];
}

}  // namespace

TEST_SUITE("simplex_lattice") {

TEST_CASE("state counts match the closed form") {
  CHECK(make_lattice(1, 2)->size() == 2);
  CHECK(make_lattice(2, 3)->size() == 6);
  CHECK(make_lattice(3, 2)->size() == 4);
  for (int K = 2; K <= 5; ++K) {
    for (int N : {1, 2, 7, 23, 50}) {
      auto lattice = make_lattice(N, K);
      CHECK(lattice->size() == static_cast<std::size_t>(pascal(N + K - 1, K - 1)));
    }
  }
}

TEST_CASE("enumeration order is colexicographic and indexing is bijective") {
  auto lattice = make_lattice(2, 3);
  const std::vector<std::vector<int>> expected = {
      {0, 0}, {1, 0}, {2, 0}, {0, 1}, {1, 1}, {0, 2}};
  REQUIRE(lattice->size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(lattice->state(i).counts == expected[i]);
    CHECK(lattice->index_of(expected[i]) == i);
  }
  std::set<std::vector<int>> seen;
  for (std::size_t i = 0; i < lattice->size(); ++i) seen.insert(lattice->state(i).counts);
  CHECK(seen.size() == lattice->size());
}

TEST_CASE("capacity cap rejects oversized lattices before allocation") {
  CHECK_THROWS_AS(SimplexLattice::enumerate(
                      ModelParams::wright_fisher(2000, std::vector<double>(5, 1.0))),
                  CapacityError);
  // A small custom cap triggers as well.
  CHECK_THROWS_AS(SimplexLattice::enumerate(
                      ModelParams::wright_fisher(50, std::vector<double>(2, 1.0)), 10),
                  CapacityError);
}

TEST_CASE("model params derived fields") {
  auto params = ModelParams::wright_fisher(8, {2.0, 12.0});
  CHECK(params.delta == 0.125);
  CHECK(params.p[0] == 2.0 / 16.0);  // stored exactly as beta_i / (2N)
  CHECK(params.p[1] == 12.0 / 16.0);
  CHECK(params.Sigma == doctest::Approx(14.0 / 16.0));
  CHECK(params.s == doctest::Approx(14.0));
  CHECK(params.delta * params.N == 1.0);

  CHECK_THROWS_AS(ModelParams::wright_fisher(4, {2.0, 12.0}), DomainError);  // Sigma >= 1
  CHECK_THROWS_AS(ModelParams::wright_fisher(8, {0.0, 1.0}), DomainError);
  CHECK_THROWS_AS(ModelParams::wright_fisher(0, {1.0, 1.0}), DomainError);
}

TEST_CASE("grid function zero extension is exact") {
  auto lattice = make_lattice(4, 2);
  GridFunction f = GridFunction::from_fn(lattice, [](std::vector<double> u) {
    return 1.0 + u[0];
  });
  const std::vector<int> outside1 = {5};
  const std::vector<int> outside2 = {-1};
  CHECK(f.at(outside1) == 0.0);
  CHECK(f.at(outside2) == 0.0);
  const std::vector<int> inside = {3};
  CHECK(f.at(inside) == doctest::Approx(1.75));
}

TEST_CASE("forward difference matches its expansion and annihilates constants") {
  auto lattice = make_lattice(6, 3);
  const double delta = lattice->delta();
  GridFunction f = GridFunction::from_fn(lattice, [](std::vector<double> u) {
    return std::sin(u[0] + 2.0 * u[1]) + u[0] * u[0];
  });

  // Mixed second difference expands to the four-point combination.
  const std::vector<int> base = {1, 2};
  MultiIndex a = {1, 1};
  double manual = f.at(std::vector<int>{2, 3}) - f.at(std::vector<int>{2, 2}) -
                  f.at(std::vector<int>{1, 3}) + f.at(std::vector<int>{1, 2});
  CHECK(forward_difference(f, base, a) == doctest::Approx(manual).epsilon(1e-14));

  GridFunction c = GridFunction::from_fn(lattice, [](std::vector<double>) { return 3.25; });
  GridFunction lin = GridFunction::from_fn(lattice, [](std::vector<double> u) { return u[0]; });
  for (const auto& mi : multi_indices_up_to(2, 3)) {
    // Away from the boundary the zero extension never triggers.
    CHECK(forward_difference(c, std::vector<int>{0, 0}, mi) == doctest::Approx(0.0));
  }
  CHECK(forward_difference(lin, std::vector<int>{1, 1}, MultiIndex{1, 0}) ==
        doctest::Approx(delta).epsilon(1e-13));

  CHECK_THROWS_AS(forward_difference(f, base, MultiIndex{0, 0}), std::invalid_argument);
}

TEST_CASE("forward difference is linear and compositions commute") {
  auto lattice = make_lattice(5, 3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  GridFunction f = GridFunction::from_fn(lattice, [&](std::vector<double>) { return unif(rng); });
  GridFunction g = GridFunction::from_fn(lattice, [&](std::vector<double>) { return unif(rng); });
  const double alpha = 0.7, beta_c = -1.3;
  std::vector<double> combo_vals(lattice->size());
  for (std::size_t i = 0; i < lattice->size(); ++i) combo_vals[i] = alpha * f[i] + beta_c * g[i];
  GridFunction combo(lattice, combo_vals);

  for (const auto& a : multi_indices_up_to(2, 4)) {
    for (std::size_t idx = 0; idx < lattice->size(); ++idx) {
      const auto& base = lattice->state(idx).counts;
      double lhs = forward_difference(combo, base, a);
      double rhs = alpha * forward_difference(f, base, a) + beta_c * forward_difference(g, base, a);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }

  // Delta^{a+b} f = Delta^a (Delta^b f) for a decomposition of a multi-index.
  MultiIndex total = {2, 1};
  MultiIndex first = {1, 0}, second = {1, 1};
  for (std::size_t idx = 0; idx < lattice->size(); ++idx) {
    const auto& base = lattice->state(idx).counts;
    double direct = forward_difference(f, base, total);
    // Apply Delta^second pointwise, then Delta^first of the result.
    double composed = 0.0;
    {
      auto inner = [&](std::span<const int> c) {
        std::vector<int> cc(c.begin(), c.end());
        return forward_difference(f, cc, second);
      };
      // Expand Delta^first over the inner function by hand (order 1 in axis 0).
      std::vector<int> shifted(base.begin(), base.end());
      shifted[0] += 1;
      composed = inner(shifted) - inner(base);
    }
    CHECK(direct == doctest::Approx(composed).epsilon(1e-12));
  }
}

TEST_CASE("sup difference closed forms") {
  auto lattice = make_lattice(8, 2);
  const double delta = lattice->delta();
  const double c = -2.5;
  GridFunction lin = GridFunction::from_fn(lattice, [c](std::vector<double> u) { return c * u[0]; });
  CHECK(sup_difference(lin, 1) == doctest::Approx(std::abs(c) * delta).epsilon(1e-13));
  CHECK(sup_difference(lin, 2) == doctest::Approx(0.0));

  GridFunction constant = GridFunction::from_fn(lattice, [](std::vector<double>) { return 4.0; });
  for (int i = 1; i <= 4; ++i) CHECK(sup_difference(constant, i) == doctest::Approx(0.0));

  GridFunction quad = GridFunction::from_fn(lattice, [](std::vector<double> u) {
    return u[0] * u[0];
  });
  // Second differences of u^2 are identically 2 delta^2; brute force agrees.
  double brute = 0.0;
  for (std::size_t idx = 0; idx < lattice->size(); ++idx) {
    int n = lattice->state(idx).counts[0];
    if (n + 2 > 8) continue;
    double v = std::abs(quad.at(std::vector<int>{n + 2}) - 2.0 * quad.at(std::vector<int>{n + 1}) +
                        quad.at(std::vector<int>{n}));
    brute = std::max(brute, v);
  }
  CHECK(sup_difference(quad, 2) == doctest::Approx(2.0 * delta * delta).epsilon(1e-12));
  CHECK(sup_difference(quad, 2) == doctest::Approx(brute).epsilon(1e-14));

  // No admissible pair: fourth difference on a 2-state lattice.
  auto tiny = make_lattice(1, 2);
  GridFunction tf = GridFunction::from_fn(tiny, [](std::vector<double> u) { return u[0]; });
  CHECK(sup_difference(tf, 4) == 0.0);
}

TEST_CASE("inner region predicate") {
  // Empty below N = 100 K^2.
  auto small = make_lattice(16, 2);
  CHECK(small->inner_region_count_limit() == -1);
  for (std::size_t i = 0; i < small->size(); ++i) CHECK_FALSE(small->in_inner_region(i));

  // N = 1600, K = 2: margin 10*2/40 = 0.5, so counts up to 800 qualify.
  auto big = SimplexLattice::enumerate(ModelParams::wright_fisher(1600, {1.0, 1.0}));
  CHECK(big->inner_region_count_limit() == 800);
  CHECK(big->in_inner_region(std::vector<int>{800}));
  CHECK_FALSE(big->in_inner_region(std::vector<int>{801}));

  // Monotone: dropping any coordinate keeps membership.
  auto mid = SimplexLattice::enumerate(ModelParams::wright_fisher(1000, {1.0, 1.0, 1.0}));
  for (std::size_t i = 0; i < mid->size(); i += 97) {
    if (!mid->in_inner_region(i)) continue;
    auto counts = mid->state(i).counts;
    for (int axis = 0; axis < 2; ++axis) {
      if (counts[axis] == 0) continue;
      auto reduced = counts;
      reduced[axis] -= 1;
      CHECK(mid->in_inner_region(reduced));
    }
  }
}

TEST_CASE("index_of rejects states outside S") {
  auto lattice = make_lattice(3, 2);
  CHECK_THROWS_AS(lattice->index_of(std::vector<int>{4}), InvalidStateError);
  CHECK_THROWS_AS(lattice->index_of(std::vector<int>{-1}), InvalidStateError);
}

}  // TEST_SUITE
