#pragma once

#include <span>
#include <vector>

namespace wfstein {

// Parameters of the N-individual, K-type chain with parent-independent
// mutation. Mutation probabilities are stored exactly as p_i = beta_i / (2N);
// Sigma is their sum and s = sum(beta).
struct ModelParams {
  int N = 0;
  int K = 0;
  std::vector<double> beta;  // size K, all > 0 in the scaled regime
  double delta = 0.0;        // 1/N
  std::vector<double> p;     // size K, p_i = beta_i / (2N)
  double Sigma = 0.0;        // sum of p
  double s = 0.0;            // sum of beta

  int dim() const { return K - 1; }

  // Scaled regime: p_i = beta_i/(2N), requires beta > 0 and Sigma < 1.
  static ModelParams wright_fisher(int N, std::vector<double> beta);

  // General mutation probabilities (0 <= Sigma <= 1). beta is back-filled as
  // 2N*p so moment formulas stay consistent. Sigma == 0 makes fixation
  // absorbing; only the kernel and simulator accept it.
  static ModelParams with_mutation_probs(int N, std::vector<double> probs);
};

}  // namespace wfstein
