#include "wfstein/util.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace wfstein {

int order_of(const MultiIndex& a) {
  int total = 0;
  for (int v : a) total += v;
  return total;
}

namespace {

void enumerate_rec(int d, int axis, int remaining, bool exact, MultiIndex& cur,
                   std::vector<MultiIndex>& out) {
  if (axis == d - 1) {
    if (exact) {
      cur[axis] = remaining;
      out.push_back(cur);
    } else {
      for (int v = 0; v <= remaining; ++v) {
        cur[axis] = v;
        out.push_back(cur);
      }
    }
    return;
  }
  for (int v = 0; v <= remaining; ++v) {
    cur[axis] = v;
    enumerate_rec(d, axis + 1, remaining - v, exact, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_with_order(int d, int total) {
  std::vector<MultiIndex> out;
  MultiIndex cur(d, 0);
  enumerate_rec(d, 0, total, /*exact=*/true, cur, out);
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(int d, int max_total) {
  std::vector<MultiIndex> out;
  for (int total = 1; total <= max_total; ++total) {
    auto batch = multi_indices_with_order(d, total);
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t hw = std::thread::hardware_concurrency();
  std::size_t workers = std::clamp<std::size_t>(hw, 1, 16);
  workers = std::min(workers, n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares: need >= 2 matching points");
  }
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  return fit;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void MeanAccumulator::merge(const MeanAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  double na = static_cast<double>(n_);
  double nb = static_cast<double>(other.n_);
  double delta = other.mean_ - mean_;
  double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

double MeanAccumulator::variance() const {
  if (n_ < 2) return 0.0;
  double v = m2_ / (static_cast<double>(n_) - 1.0);
  return v > 0.0 ? v : 0.0;
}

double MeanAccumulator::std_error() const {
  if (n_ < 2) return 0.0;
  return std::sqrt(variance() / static_cast<double>(n_));
}

double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r *= static_cast<double>(n - k + i);
    r /= static_cast<double>(i);
  }
  return r;
}

}  // namespace wfstein
