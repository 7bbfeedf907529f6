#include "wfstein/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "wfstein/errors.hpp"

namespace wfstein {

QuadratureRule gauss_jacobi_01(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi_01: n must be >= 1");
  if (a <= -1.0 || b <= -1.0) throw DomainError("gauss_jacobi_01: need a,b > -1");

  // Golub-Welsch on [-1,1] with weight (1-x)^a (1+x)^b, then map to [0,1].
  // Recurrence coefficients of the monic Jacobi polynomials.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  auto diag = [a, b](int k) {
    if (k == 0) return (b - a) / (a + b + 2.0);
    double s = 2.0 * k + a + b;
    return (b * b - a * a) / (s * (s + 2.0));
  };
  auto offdiag_sq = [a, b](int k) {
    // beta_k for k >= 1; the k = 1 case uses the cancelled form, which stays
    // finite as a + b -> -1.
    if (k == 1) {
      double s = 2.0 + a + b;
      return 4.0 * (1.0 + a) * (1.0 + b) / (s * s * (s + 1.0));
    }
    double s = 2.0 * k + a + b;
    return 4.0 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1.0) * (s - 1.0));
  };
  for (int k = 0; k < n; ++k) J(k, k) = diag(k);
  for (int k = 1; k < n; ++k) {
    double o = std::sqrt(offdiag_sq(k));
    J(k, k - 1) = o;
    J(k - 1, k) = o;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) {
    throw SingularityError("gauss_jacobi_01: eigensolver failed");
  }

  // Zeroth moment on [-1,1]: 2^{a+b+1} B(a+1, b+1).
  double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                        std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);           // node on [-1,1]
    double w = mu0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    rule.nodes[i] = 0.5 * (x + 1.0);          // map to [0,1]
    // Weight function transforms as (1-x)^a (1+x)^b dx = 2^{a+b+1} t^b (1-t)^a dt,
    // already absorbed in mu0 except the dt scaling.
    rule.weights[i] = w * std::pow(0.5, a + b + 1.0);
  }
  return rule;
}

QuadratureRule gauss_legendre_01(int n) { return gauss_jacobi_01(n, 0.0, 0.0); }

namespace {

double tensor_recurse(std::span<const QuadratureRule> rules,
                      const std::function<double(std::span<const double>)>& g,
                      std::vector<double>& x, std::vector<double>& stick, int axis,
                      double w_acc, bool with_jacobian) {
  const int d = static_cast<int>(rules.size());
  if (axis == d) return w_acc * g(x);
  double remaining = (axis == 0) ? 1.0 : stick[axis - 1];
  double acc = 0.0;
  for (std::size_t i = 0; i < rules[axis].nodes.size(); ++i) {
    double t = rules[axis].nodes[i];
    x[axis] = remaining * t;
    stick[axis] = remaining * (1.0 - t);
    double w = rules[axis].weights[i];
    if (with_jacobian) w *= remaining;  // dx_axis/dt_axis of the stick map
    acc += tensor_recurse(rules, g, x, stick, axis + 1, w_acc * w, with_jacobian);
  }
  return acc;
}

}  // namespace

double dirichlet_expectation(std::span<const double> beta,
                             const std::function<double(std::span<const double>)>& h,
                             int order) {
  const int K = static_cast<int>(beta.size());
  if (K < 2) throw DomainError("dirichlet_expectation: need K >= 2");
  const int d = K - 1;
  // Stick-breaking: x_1 = t_1, x_j = t_j * prod_{i<j}(1-t_i). The Dirichlet
  // density factorizes into per-axis Beta(beta_j, beta_{j+1}+...+beta_K)
  // weights, so each axis gets its own normalized Jacobi rule.
  std::vector<QuadratureRule> rules(d);
  double tail = 0.0;
  for (int j = K - 1; j >= 1; --j) tail += beta[j];
  double rest = tail;
  for (int j = 0; j < d; ++j) {
    double bj = beta[j];
    QuadratureRule r = gauss_jacobi_01(order, rest - 1.0, bj - 1.0);
    // Normalize to a probability rule: divide by B(bj, rest).
    double logB = std::lgamma(bj) + std::lgamma(rest) - std::lgamma(bj + rest);
    double inv = std::exp(-logB);
    for (auto& w : r.weights) w *= inv;
    rules[j] = std::move(r);
    rest -= beta[j + 1];
  }
  std::vector<double> x(d), stick(d);
  return tensor_recurse(rules, h, x, stick, 0, 1.0, /*with_jacobian=*/false);
}

double simplex_integral(int d, const std::function<double(std::span<const double>)>& g,
                        int order) {
  if (d < 1) throw DomainError("simplex_integral: need d >= 1");
  std::vector<QuadratureRule> rules(d, gauss_legendre_01(order));
  std::vector<double> x(d), stick(d);
  return tensor_recurse(rules, g, x, stick, 0, 1.0, /*with_jacobian=*/true);
}

}  // namespace wfstein
