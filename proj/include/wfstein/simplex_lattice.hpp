#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "wfstein/model_params.hpp"
#include "wfstein/util.hpp"

namespace wfstein {

// One state of the rescaled chain, stored as integer counts n_i = N * u_i of
// the first K-1 types. The K-th count is N - sum(n).
struct LatticeState {
  std::vector<int> counts;
};

// The discrete simplex S = { u in delta*Z^{K-1} : u >= 0, sum u_i <= 1 },
// enumerated in colexicographic order on counts (first coordinate varies
// fastest). Immutable after construction and safe to share across threads.
class SimplexLattice {
 public:
  static constexpr std::size_t kDefaultStateCap = 2'000'000;

  static std::shared_ptr<const SimplexLattice> enumerate(
      ModelParams params, std::size_t state_cap = kDefaultStateCap);

  const ModelParams& params() const { return params_; }
  int dim() const { return params_.dim(); }
  double delta() const { return params_.delta; }
  std::size_t size() const { return states_.size(); }

  const LatticeState& state(std::size_t idx) const { return states_[idx]; }
  std::vector<double> value(std::size_t idx) const;

  bool contains(std::span<const int> counts) const;
  std::optional<std::size_t> find(std::span<const int> counts) const;
  // Throws InvalidStateError when counts is not a state of S.
  std::size_t index_of(std::span<const int> counts) const;

  // Inner region S_N = { u in S : sum u_i <= 1 - 10K/sqrt(N) }. Membership is
  // decided by N*sum(counts) <= N^2 - 10K*N^{3/2} with 1e-9 absolute slack;
  // boundary ties at the irrational threshold are immaterial.
  bool in_inner_region(std::size_t idx) const;
  bool in_inner_region(std::span<const int> counts) const;
  // Largest count total admitted by S_N, or -1 when S_N is empty.
  long long inner_region_count_limit() const;

 private:
  SimplexLattice() = default;

  static std::uint64_t pack_key(std::span<const int> counts);

  ModelParams params_;
  std::vector<LatticeState> states_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
};

// Real values on the lattice, extended by zero on delta*Z^{K-1} \ S.
class GridFunction {
 public:
  GridFunction(std::shared_ptr<const SimplexLattice> lattice,
               std::vector<double> values);

  template <class F>
  static GridFunction from_fn(std::shared_ptr<const SimplexLattice> lattice, F&& fn) {
    std::vector<double> values(lattice->size());
    for (std::size_t i = 0; i < lattice->size(); ++i) values[i] = fn(lattice->value(i));
    return GridFunction(std::move(lattice), std::move(values));
  }

  static GridFunction zero(std::shared_ptr<const SimplexLattice> lattice);

  const SimplexLattice& lattice() const { return *lattice_; }
  std::shared_ptr<const SimplexLattice> lattice_ptr() const { return lattice_; }
  double delta() const { return lattice_->delta(); }
  int dim() const { return lattice_->dim(); }

  double operator[](std::size_t idx) const { return values_[idx]; }
  std::span<const double> values() const { return values_; }

  // Zero extension: returns exactly 0.0 at any lattice point outside S.
  double at(std::span<const int> counts) const;

  GridFunction scaled(double factor) const;

 private:
  std::shared_ptr<const SimplexLattice> lattice_;
  std::vector<double> values_;
};

// Composition of ||a||_1 single-step forward differences with step delta in
// the axis directions indicated by a (repetitions allowed). base_counts may
// lie anywhere on Z^{K-1}; evaluations use the zero extension.
double forward_difference(const GridFunction& f, std::span<const int> base_counts,
                          const MultiIndex& a);

// B_i(f): max of |Delta^a f(u)| over ||a||_1 = i, u in S, u + delta*a in S.
// Returns 0 when no admissible (u, a) pair exists.
double sup_difference(const GridFunction& f, int order_i);

}  // namespace wfstein
