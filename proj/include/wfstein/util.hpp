#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wfstein {

// Multi-index a >= 0 over the d lattice axes; a[i] is the difference /
// derivative order along axis i.
using MultiIndex = std::vector<int>;

int order_of(const MultiIndex& a);

// All multi-indices over d axes with ||a||_1 == total, in lexicographic order.
std::vector<MultiIndex> multi_indices_with_order(int d, int total);

// All multi-indices with 1 <= ||a||_1 <= max_total.
std::vector<MultiIndex> multi_indices_up_to(int d, int max_total);

// Runs fn(begin, end) over a chunked partition of [0, n). Chunks are
// contiguous and assigned to threads in index order, so reductions that
// combine per-chunk results in chunk order stay deterministic.
void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares of y against x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

// splitmix64; used to derive independent per-stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Streaming mean / standard-error accumulator (Welford; exact zero variance
// for constant inputs).
class MeanAccumulator {
 public:
  void add(double x) {
    ++n_;
    double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
  }
  void merge(const MeanAccumulator& other);
  std::int64_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;
  double std_error() const;

 private:
  std::int64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

double binomial_coefficient(int n, int k);

}  // namespace wfstein
