#include <doctest.h>

#include <cmath>

#include "wfstein/quadrature.hpp"

using namespace wfstein;

TEST_SUITE("quadrature") {

TEST_CASE("legendre rule integrates polynomials exactly") {
  auto rule = gauss_legendre_01(8);
  double total = 0.0, x3 = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    total += rule.weights[i];
    x3 += rule.weights[i] * std::pow(rule.nodes[i], 3);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x3 == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("jacobi rule reproduces beta moments") {
  // weight x^2 (1-x)^1 on [0,1]: mass B(3,2) = 1/12, first moment 3/5 * mass.
  auto rule = gauss_jacobi_01(16, 1.0, 2.0);
  double mass = 0.0, first = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    mass += rule.weights[i];
    first += rule.weights[i] * rule.nodes[i];
  }
  CHECK(mass == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(first / mass == doctest::Approx(0.6).epsilon(1e-13));
}

TEST_CASE("simplex integral recovers areas and moments") {
  // Volume of the 2-simplex is 1/2; integral of x1 over it is 1/6.
  double vol = simplex_integral(2, [](std::span<const double>) { return 1.0; }, 24);
  CHECK(vol == doctest::Approx(0.5).epsilon(1e-13));
  double m1 = simplex_integral(2, [](std::span<const double> x) { return x[0]; }, 24);
  CHECK(m1 == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
}

TEST_CASE("dirichlet expectation handles the uniform case") {
  std::vector<double> beta = {1.0, 1.0};
  double mean = dirichlet_expectation(beta, [](std::span<const double> x) { return x[0]; }, 16);
  CHECK(mean == doctest::Approx(0.5).epsilon(1e-13));
  double second = dirichlet_expectation(
      beta, [](std::span<const double> x) { return x[0] * x[0]; }, 16);
  CHECK(second == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

}  // TEST_SUITE
