#include "wfstein/moments.hpp"

#include <cmath>

#include "wfstein/errors.hpp"
#include "wfstein/wf_kernel.hpp"

namespace wfstein {

namespace {

void require_distinct(std::span<const int> idx, const char* what) {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      if (idx[a] == idx[b]) throw IndexCollisionError(what);
    }
  }
}

}  // namespace

double multinomial_moment(int N, std::span<const double> p, MultinomialPattern pattern,
                          std::span<const int> idx) {
  const double n = static_cast<double>(N);
  switch (pattern) {
    case MultinomialPattern::Xi: {
      double pi = p[idx[0]];
      return n * pi;
    }
    case MultinomialPattern::Xi2: {
      double pi = p[idx[0]];
      return n * (n - 1.0) * pi * pi + n * pi;
    }
    case MultinomialPattern::XiXj: {
      require_distinct(idx.subspan(0, 2), "multinomial_moment: E X_i X_j needs i != j");
      return n * (n - 1.0) * p[idx[0]] * p[idx[1]];
    }
    case MultinomialPattern::XiXjXk: {
      require_distinct(idx.subspan(0, 3),
                       "multinomial_moment: E X_i X_j X_k needs distinct indices");
      return n * (n - 1.0) * (n - 2.0) * p[idx[0]] * p[idx[1]] * p[idx[2]];
    }
    case MultinomialPattern::Xi2Xj: {
      require_distinct(idx.subspan(0, 2), "multinomial_moment: E X_i^2 X_j needs i != j");
      double pi = p[idx[0]], pj = p[idx[1]];
      return n * (n - 1.0) * (n - 2.0) * pi * pi * pj + n * (n - 1.0) * pi * pj;
    }
    case MultinomialPattern::Xi3: {
      double pi = p[idx[0]];
      return n * (n - 1.0) * (n - 2.0) * pi * pi * pi + 3.0 * n * (n - 1.0) * pi * pi +
             n * pi;
    }
  }
  throw std::invalid_argument("multinomial_moment: unknown pattern");
}

double u_bar(const ModelParams& params, std::span<const int> counts, int i) {
  if (i < 0 || i >= params.K) throw DomainError("u_bar: coordinate out of range");
  // Index K-1 addresses the implicit last coordinate u_K = 1 - sum u.
  double u_i;
  if (i == params.K - 1) {
    long long total = 0;
    for (int c : counts) total += c;
    u_i = params.delta * static_cast<double>(params.N - total);
  } else {
    u_i = params.delta * counts[i];
  }
  return u_i * params.Sigma - params.p[i];
}

double drift(const ModelParams& params, std::span<const int> counts, int i) {
  return -u_bar(params, counts, i);
}

double diffusion(const ModelParams& params, std::span<const int> counts, int i, int j) {
  double ubar_i = u_bar(params, counts, i);
  double ubar_j = u_bar(params, counts, j);
  double u_i = params.delta * counts[i];
  double u_j = params.delta * counts[j];
  double kron = (i == j) ? 1.0 : 0.0;
  return ubar_i * ubar_j +
         (u_i - ubar_i) * (kron - (u_j - ubar_j)) / static_cast<double>(params.N);
}

ThirdMomentResult third_moment_exact(const SimplexLattice& lattice, std::size_t state_idx,
                                     int i, int j, int k, std::size_t cap) {
  if (lattice.size() > cap) {
    throw CapacityError("third_moment_exact: outcome enumeration above cap");
  }
  const ModelParams& params = lattice.params();
  const auto& counts = lattice.state(state_idx).counts;
  std::vector<double> row = transition_row(lattice, state_idx);
  double ui = params.delta * counts[i];
  double uj = params.delta * counts[j];
  double uk = params.delta * counts[k];
  double acc = 0.0;
  for (std::size_t y = 0; y < lattice.size(); ++y) {
    const auto& target = lattice.state(y).counts;
    acc += row[y] * (params.delta * target[i] - ui) * (params.delta * target[j] - uj) *
           (params.delta * target[k] - uk);
  }
  ThirdMomentResult out;
  out.value = acc;
  double base = 1.0 / static_cast<double>(params.N) + params.Sigma;
  out.envelope = base * base;
  return out;
}

double third_moment_iii_closed_form(const ModelParams& params, std::span<const int> counts,
                                    int i) {
  double ubar = u_bar(params, counts, i);
  double m = params.delta * counts[i] - ubar;  // trial probability of type i
  double N = static_cast<double>(params.N);
  return -ubar * ubar * ubar - 3.0 / N * ubar * m * (1.0 - m) +
         m * (1.0 - m) * (1.0 - 2.0 * m) / (N * N);
}

FourthMomentResult fourth_abs_moment(const SimplexLattice& lattice, std::size_t state_idx,
                                     int i, int j, int k, int l, std::size_t cap,
                                     int mc_draws, std::uint64_t seed) {
  const ModelParams& params = lattice.params();
  const auto& counts = lattice.state(state_idx).counts;
  double ui = params.delta * counts[i];
  double uj = params.delta * counts[j];
  double uk = params.delta * counts[k];
  double ul = params.delta * counts[l];

  FourthMomentResult out;
  double base = 2.0 / std::sqrt(static_cast<double>(params.N)) + params.Sigma;
  out.envelope = base * base * base * base;

  if (lattice.size() <= cap) {
    std::vector<double> row = transition_row(lattice, state_idx);
    double acc = 0.0;
    for (std::size_t y = 0; y < lattice.size(); ++y) {
      const auto& target = lattice.state(y).counts;
      acc += row[y] * std::abs((params.delta * target[i] - ui) *
                               (params.delta * target[j] - uj) *
                               (params.delta * target[k] - uk) *
                               (params.delta * target[l] - ul));
    }
    out.value = acc;
    out.exact = true;
    return out;
  }

  MeanAccumulator acc;
  LatticeState u0{counts};
  for (int r = 0; r < mc_draws; ++r) {
    auto step = simulate(params, u0, 1, mix_seed(seed, static_cast<std::uint64_t>(r)));
    const auto& target = step[1].counts;
    acc.add(std::abs((params.delta * target[i] - ui) * (params.delta * target[j] - uj) *
                     (params.delta * target[k] - uk) * (params.delta * target[l] - ul)));
  }
  out.value = acc.mean();
  out.std_error = acc.std_error();
  out.exact = false;
  return out;
}

BinomialTailResult binomial_tail_bound(const ModelParams& params,
                                       std::span<const int> counts, int M) {
  if (M < 0 || M > params.N) throw DomainError("binomial_tail_bound: need 0 <= M <= N");
  double p_K = params.p[params.K - 1];
  if (params.Sigma <= p_K) {
    throw DomainError("binomial_tail_bound: requires Sigma > p_K");
  }
  long long total = 0;
  for (int c : counts) total += c;
  if (total > params.N) throw InvalidStateError("binomial_tail_bound: state outside S");
  double u_K = params.delta * static_cast<double>(params.N - total);

  // N U_K(1) ~ Binomial(N, q) with q = u_K (1 - Sigma) + p_K.
  double q = u_K * (1.0 - params.Sigma) + p_K;
  double log_q = std::log(q);
  double log_1mq = (q < 1.0) ? std::log1p(-q) : -std::numeric_limits<double>::infinity();
  double exact = 0.0;
  for (int c = 0; c <= M; ++c) {
    double logp = std::lgamma(params.N + 1.0) - std::lgamma(c + 1.0) -
                  std::lgamma(params.N - c + 1.0);
    logp += (c > 0) ? c * log_q : 0.0;
    logp += (params.N - c > 0) ? (params.N - c) * log_1mq : 0.0;
    exact += std::isfinite(logp) ? std::exp(logp) : 0.0;
  }
  if (exact > 1.0) exact = 1.0;

  BinomialTailResult out;
  out.exact = exact;
  out.bound = (M + 1.0) *
              std::pow(static_cast<double>(params.N) / (params.Sigma - p_K),
                       static_cast<double>(M)) *
              std::pow(1.0 - u_K * (1.0 - params.Sigma), static_cast<double>(params.N));
  return out;
}

MomentReport moment_report(const SimplexLattice& lattice, std::size_t state_idx) {
  const ModelParams& params = lattice.params();
  const int d = params.dim();
  MomentReport report;
  report.state = lattice.state(state_idx);
  report.b.resize(d);
  report.a.resize(static_cast<std::size_t>(d) * d);
  const auto& counts = report.state.counts;
  for (int i = 0; i < d; ++i) {
    report.b[i] = drift(params, counts, i);
    for (int j = 0; j < d; ++j) {
      report.a[static_cast<std::size_t>(i) * d + j] = diffusion(params, counts, i, j);
    }
  }
  double cb = 1.0 / static_cast<double>(params.N) + params.Sigma;
  report.c_bound = cb * cb;
  double db = 2.0 / std::sqrt(static_cast<double>(params.N)) + params.Sigma;
  report.dbar_bound = db * db * db * db;
  return report;
}

}  // namespace wfstein
