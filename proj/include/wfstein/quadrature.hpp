#pragma once

#include <functional>
#include <span>
#include <vector>

namespace wfstein {

struct QuadratureRule {
  std::vector<double> nodes;    // in (0, 1)
  std::vector<double> weights;  // sum to the weight-function mass
};

// n-point Gauss-Jacobi rule on [0,1] for the weight x^b (1-x)^a, a,b > -1.
// Exact for polynomial integrands of degree <= 2n-1.
QuadratureRule gauss_jacobi_01(int n, double a, double b);

// Gauss-Legendre on [0,1] (Jacobi with a = b = 0).
QuadratureRule gauss_legendre_01(int n);

// E[h(Z)] for Z ~ Dirichlet(beta), via the stick-breaking tensorization: each
// axis integrates against its own Jacobi weight, so polynomial h of per-axis
// degree < order is integrated exactly. h takes the first K-1 coordinates.
double dirichlet_expectation(std::span<const double> beta,
                             const std::function<double(std::span<const double>)>& h,
                             int order);

// Plain Gauss-Legendre tensor integral of g over the open simplex
// {x >= 0, sum x_i <= 1} in d dimensions (stick-breaking map with Jacobian).
// Independent of the Jacobi machinery; used as a normalization oracle.
double simplex_integral(int d, const std::function<double(std::span<const double>)>& g,
                        int order);

}  // namespace wfstein
