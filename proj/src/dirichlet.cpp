#include "wfstein/dirichlet.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "wfstein/errors.hpp"

namespace wfstein {

DirichletLaw::DirichletLaw(std::vector<double> beta_in) : beta(std::move(beta_in)) {
  if (beta.size() < 2) throw DomainError("DirichletLaw: need K >= 2");
  for (double b : beta) {
    if (b <= 0.0) throw DomainError("DirichletLaw: beta entries must be > 0");
    s += b;
  }
}

double density(const DirichletLaw& law, std::span<const double> x) {
  const int d = law.dim();
  if (static_cast<int>(x.size()) != d) {
    throw DomainError("density: point has wrong dimension");
  }
  double xK = 1.0;
  for (double xi : x) {
    if (xi <= 0.0) throw DomainError("density: point must be strictly interior");
    xK -= xi;
  }
  if (xK <= 0.0) throw DomainError("density: point must be strictly interior");

  double log_density = std::lgamma(law.s);
  for (int i = 0; i < law.K(); ++i) log_density -= std::lgamma(law.beta[i]);
  for (int i = 0; i < d; ++i) log_density += (law.beta[i] - 1.0) * std::log(x[i]);
  log_density += (law.beta[d] - 1.0) * std::log(xK);
  return std::exp(log_density);
}

double monomial_moment(const DirichletLaw& law, const MultiIndex& a) {
  if (static_cast<int>(a.size()) != law.K()) {
    throw DomainError("monomial_moment: multi-index must cover all K coordinates");
  }
  int total = 0;
  double numer = 1.0;
  for (int i = 0; i < law.K(); ++i) {
    if (a[i] < 0) throw DomainError("monomial_moment: exponents must be >= 0");
    for (int r = 0; r < a[i]; ++r) numer *= law.beta[i] + r;
    total += a[i];
  }
  double denom = 1.0;
  for (int r = 0; r < total; ++r) denom *= law.s + r;
  return numer / denom;
}

std::vector<std::vector<double>> sample(const DirichletLaw& law, std::uint64_t seed, int n) {
  if (n < 1) throw DomainError("sample: n must be >= 1");
  const int K = law.K();
  std::mt19937_64 rng(seed);
  std::vector<std::gamma_distribution<double>> gammas;
  gammas.reserve(K);
  for (int i = 0; i < K; ++i) gammas.emplace_back(law.beta[i], 1.0);

  std::vector<std::vector<double>> out(n, std::vector<double>(K - 1));
  std::vector<double> g(K);
  for (int r = 0; r < n; ++r) {
    double total = 0.0;
    for (int i = 0; i < K; ++i) {
      g[i] = gammas[i](rng);
      total += g[i];
    }
    for (int i = 0; i < K - 1; ++i) out[r][i] = g[i] / total;
  }
  return out;
}

double beta_tail(const DirichletLaw& law, double t) {
  if (t < 0.0 || t > 1.0) throw DomainError("beta_tail: t must be in [0,1]");
  double a = law.beta.back();
  double b = law.s - a;
  if (b <= 0.0) throw DomainError("beta_tail: requires s > beta_K");
  if (t == 0.0) return 0.0;
  if (t == 1.0) return 1.0;
  return boost::math::ibeta(a, b, t);
}

double beta_tail_envelope(const DirichletLaw& law, int N, int K_types) {
  if (N < 2) throw DomainError("beta_tail_envelope: need N >= 2");
  double beta_K = law.beta.back();
  double rest = law.s - beta_K;
  if (rest <= 0.0) throw DomainError("beta_tail_envelope: requires s > beta_K");
  double t = 10.0 * static_cast<double>(K_types) / std::sqrt(static_cast<double>(N));
  double prefactor =
      std::exp(std::lgamma(law.s) - std::lgamma(rest) - std::lgamma(beta_K)) / beta_K;
  double boundary = 1.0 + std::pow(1.0 - 1.0 / std::sqrt(static_cast<double>(N)),
                                   -std::abs(law.s - beta_K - 1.0));
  return prefactor * std::pow(t, beta_K) * boundary;
}

double apply_generator_Z(std::span<const double> beta, double s,
                         std::span<const double> grad, std::span<const double> hess,
                         std::span<const double> x) {
  const int d = static_cast<int>(x.size());
  if (static_cast<int>(grad.size()) != d ||
      static_cast<int>(hess.size()) != d * d ||
      static_cast<int>(beta.size()) != d + 1) {
    throw DomainError("apply_generator_Z: dimension mismatch");
  }
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      double aij = x[i] * ((i == j ? 1.0 : 0.0) - x[j]);
      acc += aij * hess[i * d + j];
    }
  }
  for (int i = 0; i < d; ++i) acc += (beta[i] - s * x[i]) * grad[i];
  return 0.5 * acc;
}

double apply_generator_Z(const ModelParams& params, std::span<const double> grad,
                         std::span<const double> hess, std::span<const double> x) {
  return apply_generator_Z(params.beta, params.s, grad, hess, x);
}

double apply_generator_Z(const DirichletLaw& law, std::span<const double> grad,
                         std::span<const double> hess, std::span<const double> x) {
  return apply_generator_Z(law.beta, law.s, grad, hess, x);
}

}  // namespace wfstein
