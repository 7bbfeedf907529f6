#include "wfstein/simplex_lattice.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "wfstein/errors.hpp"

namespace wfstein {

std::shared_ptr<const SimplexLattice> SimplexLattice::enumerate(
    ModelParams params, std::size_t state_cap) {
  const int d = params.dim();
  const int N = params.N;

  double expected = binomial_coefficient(N + params.K - 1, params.K - 1);
  if (expected > static_cast<double>(state_cap)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "SimplexLattice: %.0f states for N=%d K=%d exceeds cap %zu",
                  expected, N, params.K, state_cap);
    throw CapacityError(msg);
  }

  auto lattice = std::shared_ptr<SimplexLattice>(new SimplexLattice());
  lattice->params_ = std::move(params);
  lattice->states_.reserve(static_cast<std::size_t>(expected));

  // Colexicographic odometer: bump axis 0, carry into higher axes whenever
  // the count total would exceed N.
  std::vector<int> counts(d, 0);
  int total = 0;
  while (true) {
    lattice->states_.push_back(LatticeState{counts});
    int axis = 0;
    while (axis < d) {
      if (total < N) {
        ++counts[axis];
        ++total;
        break;
      }
      total -= counts[axis];
      counts[axis] = 0;
      ++axis;
    }
    if (axis == d) break;
  }

  lattice->index_.reserve(lattice->states_.size() * 2);
  for (std::size_t i = 0; i < lattice->states_.size(); ++i) {
    lattice->index_.emplace(pack_key(lattice->states_[i].counts),
                            static_cast<std::uint32_t>(i));
  }
  return lattice;
}

std::vector<double> SimplexLattice::value(std::size_t idx) const {
  const auto& c = states_[idx].counts;
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = params_.delta * c[i];
  return v;
}

std::uint64_t SimplexLattice::pack_key(std::span<const int> counts) {
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    key |= static_cast<std::uint64_t>(static_cast<std::uint16_t>(counts[i])) << (16 * i);
  }
  return key;
}

bool SimplexLattice::contains(std::span<const int> counts) const {
  if (static_cast<int>(counts.size()) != dim()) return false;
  long long total = 0;
  for (int c : counts) {
    if (c < 0) return false;
    total += c;
  }
  return total <= params_.N;
}

std::optional<std::size_t> SimplexLattice::find(std::span<const int> counts) const {
  if (!contains(counts)) return std::nullopt;
  auto it = index_.find(pack_key(counts));
  if (it == index_.end()) return std::nullopt;
  return static_cast<std::size_t>(it->second);
}

std::size_t SimplexLattice::index_of(std::span<const int> counts) const {
  auto idx = find(counts);
  if (!idx) throw InvalidStateError("SimplexLattice: state is outside S");
  return *idx;
}

long long SimplexLattice::inner_region_count_limit() const {
  const double N = static_cast<double>(params_.N);
  const double K = static_cast<double>(params_.K);
  // N * total <= N^2 - 10K N^{3/2}  (with slack), i.e. total <= N - 10K sqrt(N).
  const double limit = (N * N - 10.0 * K * std::pow(N, 1.5)) / N;
  if (limit < -1e-9) return -1;
  return static_cast<long long>(std::floor(limit + 1e-9));
}

bool SimplexLattice::in_inner_region(std::span<const int> counts) const {
  if (!contains(counts)) return false;
  long long total = 0;
  for (int c : counts) total += c;
  long long limit = inner_region_count_limit();
  return limit >= 0 && total <= limit;
}

bool SimplexLattice::in_inner_region(std::size_t idx) const {
  return in_inner_region(std::span<const int>(states_[idx].counts));
}

GridFunction::GridFunction(std::shared_ptr<const SimplexLattice> lattice,
                           std::vector<double> values)
    : lattice_(std::move(lattice)), values_(std::move(values)) {
  if (values_.size() != lattice_->size()) {
    throw std::invalid_argument("GridFunction: value count must match lattice size");
  }
}

GridFunction GridFunction::zero(std::shared_ptr<const SimplexLattice> lattice) {
  std::vector<double> values(lattice->size(), 0.0);
  return GridFunction(std::move(lattice), std::move(values));
}

double GridFunction::at(std::span<const int> counts) const {
  auto idx = lattice_->find(counts);
  return idx ? values_[*idx] : 0.0;
}

GridFunction GridFunction::scaled(double factor) const {
  std::vector<double> values(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) values[i] = factor * values_[i];
  return GridFunction(lattice_, std::move(values));
}

double forward_difference(const GridFunction& f, std::span<const int> base_counts,
                          const MultiIndex& a) {
  const int d = f.dim();
  if (static_cast<int>(a.size()) != d) {
    throw std::invalid_argument("forward_difference: multi-index dimension mismatch");
  }
  if (order_of(a) < 1) {
    throw std::invalid_argument("forward_difference: ||a||_1 must be >= 1");
  }
  // Delta^a f(u) = sum over 0 <= j <= a of prod_i (-1)^{a_i - j_i} C(a_i, j_i)
  // f(u + j), the per-axis binomial expansion of the composed differences.
  std::vector<int> offset(d, 0);
  std::vector<int> point(d);
  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) {
      double c = binomial_coefficient(a[i], offset[i]);
      w *= ((a[i] - offset[i]) % 2 == 0) ? c : -c;
      point[i] = base_counts[i] + offset[i];
    }
    acc += w * f.at(point);
    int axis = 0;
    while (axis < d && offset[axis] == a[axis]) {
      offset[axis] = 0;
      ++axis;
    }
    if (axis == d) break;
    ++offset[axis];
  }
  return acc;
}

double sup_difference(const GridFunction& f, int order_i) {
  if (order_i < 1) throw std::invalid_argument("sup_difference: order must be >= 1");
  const auto& lattice = f.lattice();
  const int d = f.dim();
  const int N = lattice.params().N;
  double best = 0.0;
  for (const auto& a : multi_indices_with_order(d, order_i)) {
    for (std::size_t idx = 0; idx < lattice.size(); ++idx) {
      const auto& counts = lattice.state(idx).counts;
      long long shifted_total = 0;
      for (int i = 0; i < d; ++i) shifted_total += counts[i] + a[i];
      if (shifted_total > N) continue;  // u + delta*a must stay in S
      double v = std::abs(forward_difference(f, counts, a));
      if (v > best) best = v;
    }
  }
  return best;
}

}  // namespace wfstein
