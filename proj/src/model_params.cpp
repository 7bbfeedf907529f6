#include "wfstein/model_params.hpp"

#include <numeric>
#include <stdexcept>

#include "wfstein/errors.hpp"

namespace wfstein {

namespace {

void check_shape(int N, std::size_t K) {
  if (N < 1) throw DomainError("ModelParams: N must be >= 1");
  if (K < 2) throw DomainError("ModelParams: K must be >= 2");
}

}  // namespace

ModelParams ModelParams::wright_fisher(int N, std::vector<double> beta) {
  check_shape(N, beta.size());
  ModelParams mp;
  mp.N = N;
  mp.K = static_cast<int>(beta.size());
  mp.beta = std::move(beta);
  mp.delta = 1.0 / static_cast<double>(N);
  mp.p.resize(mp.K);
  for (int i = 0; i < mp.K; ++i) {
    if (mp.beta[i] <= 0.0) throw DomainError("ModelParams: beta entries must be > 0");
    mp.p[i] = mp.beta[i] / (2.0 * static_cast<double>(N));
  }
  mp.Sigma = std::accumulate(mp.p.begin(), mp.p.end(), 0.0);
  mp.s = std::accumulate(mp.beta.begin(), mp.beta.end(), 0.0);
  if (mp.Sigma >= 1.0) {
    throw DomainError("ModelParams: sum of mutation probabilities must be < 1");
  }
  return mp;
}

ModelParams ModelParams::with_mutation_probs(int N, std::vector<double> probs) {
  check_shape(N, probs.size());
  ModelParams mp;
  mp.N = N;
  mp.K = static_cast<int>(probs.size());
  mp.p = std::move(probs);
  mp.delta = 1.0 / static_cast<double>(N);
  mp.beta.resize(mp.K);
  for (int i = 0; i < mp.K; ++i) {
    if (mp.p[i] < 0.0) throw DomainError("ModelParams: mutation probabilities must be >= 0");
    mp.beta[i] = 2.0 * static_cast<double>(N) * mp.p[i];
  }
  mp.Sigma = std::accumulate(mp.p.begin(), mp.p.end(), 0.0);
  mp.s = std::accumulate(mp.beta.begin(), mp.beta.end(), 0.0);
  if (mp.Sigma > 1.0) {
    throw DomainError("ModelParams: sum of mutation probabilities must be <= 1");
  }
  return mp;
}

}  // namespace wfstein
