#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wfstein/errors.hpp"
#include "wfstein/simplex_lattice.hpp"
#include "wfstein/util.hpp"

namespace wfstein {

// The five degree-7 weight polynomials alpha^k_{k+i}((x - delta*k)/delta),
// i = 0..4, of the Hermite lattice interpolator A. Coefficients are exact
// rationals over denominator 6, derived once by expanding the per-cell
// polynomial
//
//   P_k(x) = f + t (D - D^2/2 + D^3/3) f + t^2 (D^2 - D^3) f / 2
//            + t^3 D^3 f / 6
//            + (-23/3 t^4 + 41/2 t^5 - 55/3 t^6 + 11/2 t^7) D^4 f,
//
// where t = (x - delta*k)/delta and D^n is the n-th forward difference at
// delta*k, and collecting the coefficient of each stencil value f(delta(k+i)).
// Construction verifies (with integer arithmetic) that the expansion
// interpolates, that the weights sum to one, that cells join with matching
// values and first three derivatives, and that cubics are reproduced; any
// failure throws instead of being patched.
class WeightKernel {
 public:
  static constexpr int kDenominator = 6;
  static constexpr int kStencil = 5;
  static constexpr int kDegree = 7;

  WeightKernel();  // derives coefficients from the per-cell polynomial

  // Bypasses derivation; used to inject corrupted tables in harness tests.
  static WeightKernel from_table(
      const std::array<std::array<long long, kDegree + 1>, kStencil>& numerators);

  static const WeightKernel& instance();

  long long numerator(int i, int power) const { return num_[i][power]; }

  double weight(int i, double t) const;
  // d^order/dt^order of alpha_i at t.
  double weight_derivative(int i, int order, double t) const;
  std::array<double, kStencil> weights(double t) const;

  // Exact integer identity checks of the stored table. Returns a list of
  // (name, ok) pairs; `instance()` throws if any fails.
  std::vector<std::pair<std::string, bool>> verify_identities() const;

  // sup over t in [0,1] of |alpha_i(t)| (finite; sampled once).
  double max_abs_weight(int i) const { return max_abs_weight_[i]; }
  // max over t of sum_i |alpha_i(t)|.
  double sum_abs_weights_bound() const { return sum_abs_bound_; }
  // Smallest C_n with |sum_i alpha_i^{(n)}(t) f_i| <= C_n * max_m |D^n f at
  // offset m| for every t; per-axis ingredient of the derivative bound.
  double derivative_bound_constant(int order) const { return deriv_bound_[order]; }

 private:
  void finalize();  // fills double coefficients and measured constants

  std::array<std::array<long long, kDegree + 1>, kStencil> num_{};
  std::array<std::array<double, kDegree + 1>, kStencil> coeff_{};
  std::array<double, kStencil> max_abs_weight_{};
  double sum_abs_bound_ = 0.0;
  std::array<double, kStencil> deriv_bound_{};
};

struct Stencil1D {
  long long k = 0;
  std::array<double, WeightKernel::kStencil> w{};
};

// k = floor(x/delta) and the five stencil weights at x.
Stencil1D weights_1d(double x, double delta, const WeightKernel& kernel = WeightKernel::instance());

namespace detail {

constexpr int kMaxDim = 6;

struct CellFrame {
  int d = 0;
  std::array<long long, kMaxDim> base{};
  std::array<double, kMaxDim> t{};
};

inline CellFrame locate_cell(std::span<const double> x, double delta) {
  CellFrame frame;
  frame.d = static_cast<int>(x.size());
  if (frame.d > kMaxDim) throw DomainError("interpolator: dimension too large");
  for (int j = 0; j < frame.d; ++j) {
    double q = x[j] / delta;
    double fl = std::floor(q);
    frame.base[j] = static_cast<long long>(fl);
    frame.t[j] = q - fl;
  }
  return frame;
}

// Tensor contraction of per-axis weight rows against f on the 5^d stencil.
template <class F>
double contract(F&& f, const CellFrame& frame,
                const std::array<std::array<double, WeightKernel::kStencil>, kMaxDim>& rows) {
  const int d = frame.d;
  std::array<int, kMaxDim> offset{};
  std::array<int, kMaxDim> point{};
  double acc = 0.0;
  while (true) {
    double w = 1.0;
    for (int j = 0; j < d; ++j) {
      w *= rows[j][offset[j]];
      point[j] = static_cast<int>(frame.base[j]) + offset[j];
    }
    acc += w * f(std::span<const int>(point.data(), d));
    int axis = 0;
    while (axis < d && offset[axis] == WeightKernel::kStencil - 1) {
      offset[axis] = 0;
      ++axis;
    }
    if (axis == d) break;
    ++offset[axis];
  }
  return acc;
}

}  // namespace detail

// A f(x): tensor-product weighted sum over the 5^d stencil anchored at
// floor(x/delta). f is any callable double(span<const int>) giving lattice
// values at integer points of delta*Z^d (zero extension supplies values the
// caller does not have).
template <class F>
double eval_interpolant(F&& f, std::span<const double> x, double delta,
                        const WeightKernel& kernel = WeightKernel::instance()) {
  auto frame = detail::locate_cell(x, delta);
  std::array<std::array<double, WeightKernel::kStencil>, detail::kMaxDim> rows;
  for (int j = 0; j < frame.d; ++j) rows[j] = kernel.weights(frame.t[j]);
  return detail::contract(f, frame, rows);
}

// D^a A f(x), by analytic differentiation of the per-cell polynomial.
// Requires ||a||_1 <= 4 and per-axis order <= 4; when ||a||_1 == 4 the point
// must not lie on a cell face (the derivative exists only a.e. there).
template <class F>
double eval_derivative(F&& f, std::span<const double> x, double delta, const MultiIndex& a,
                       const WeightKernel& kernel = WeightKernel::instance()) {
  auto frame = detail::locate_cell(x, delta);
  if (static_cast<int>(a.size()) != frame.d) {
    throw std::invalid_argument("eval_derivative: multi-index dimension mismatch");
  }
  int total = order_of(a);
  if (total > 4) throw std::invalid_argument("eval_derivative: ||a||_1 must be <= 4");
  if (total == 4) {
    for (int j = 0; j < frame.d; ++j) {
      if (frame.t[j] == 0.0) {
        throw FacePointError("eval_derivative: fourth-order derivative on a cell face");
      }
    }
  }
  std::array<std::array<double, WeightKernel::kStencil>, detail::kMaxDim> rows;
  double scale = 1.0;
  for (int j = 0; j < frame.d; ++j) {
    if (a[j] < 0 || a[j] > 4) throw std::invalid_argument("eval_derivative: bad axis order");
    for (int i = 0; i < WeightKernel::kStencil; ++i) {
      rows[j][i] = kernel.weight_derivative(i, a[j], frame.t[j]);
    }
    for (int r = 0; r < a[j]; ++r) scale /= delta;
  }
  return scale * detail::contract(f, frame, rows);
}

// Same derivative evaluated with an explicitly pinned cell base; lets tests
// take one-sided derivatives on a face from the neighbouring cell.
template <class F>
double eval_derivative_in_cell(F&& f, std::span<const long long> cell_base,
                               std::span<const double> x, double delta, const MultiIndex& a,
                               const WeightKernel& kernel = WeightKernel::instance()) {
  detail::CellFrame frame;
  frame.d = static_cast<int>(x.size());
  if (frame.d > detail::kMaxDim) throw DomainError("interpolator: dimension too large");
  for (int j = 0; j < frame.d; ++j) {
    frame.base[j] = cell_base[j];
    frame.t[j] = x[j] / delta - static_cast<double>(cell_base[j]);
  }
  std::array<std::array<double, WeightKernel::kStencil>, detail::kMaxDim> rows;
  double scale = 1.0;
  for (int j = 0; j < frame.d; ++j) {
    for (int i = 0; i < WeightKernel::kStencil; ++i) {
      rows[j][i] = kernel.weight_derivative(i, a[j], frame.t[j]);
    }
    for (int r = 0; r < a[j]; ++r) scale /= delta;
  }
  return scale * detail::contract(f, frame, rows);
}

// GridFunction overloads (zero extension outside S built in).
double eval_interpolant(const GridFunction& f, std::span<const double> x);
double eval_derivative(const GridFunction& f, std::span<const double> x, const MultiIndex& a);

// Mixed one-axis difference combinations whose compositions give the
// interpolant's derivatives at grid points:
//   order 0: f,   order 1: (D - D^2/2 + D^3/3) f,
//   order 2: (D^2 - D^3) f,   order 3: D^3 f,  all along `axis`.
double tilde_delta(const GridFunction& f, std::span<const int> base_counts, int axis,
                   int order_j);
// Composition over all axes with per-axis orders a. Scaled by delta^{-||a||}
// this equals D^a A f at the grid point (checked in the identity suite).
double tilde_delta_multi(const GridFunction& f, std::span<const int> base_counts,
                         const MultiIndex& a);

struct ProductDecomposition {
  double main = 0.0;  // A f(x) * A g(x)
  double eps = 0.0;   // A(fg)(x) - main
};

ProductDecomposition product_decomposition(const GridFunction& f, const GridFunction& g,
                                           std::span<const double> x);

// Analytic test function with partial derivatives, for approximation studies.
struct SmoothFunction {
  std::function<double(std::span<const double>)> value;
  // partial(x, a) = D^a value(x); needed up to the smoothness order used.
  std::function<double(std::span<const double>, const MultiIndex&)> partial;
};

struct InterpolationErrorReport {
  std::vector<double> deltas;
  std::vector<double> max_errors;  // max |f - A f| over the sample grid
  double fitted_order = 0.0;       // least-squares slope of log err vs log delta
};

// Max interpolation error over a sample of the box [lo, hi]^d at deltas
// delta0, delta0/2, ..., delta0/2^{levels-1}, plus the fitted order.
InterpolationErrorReport interpolation_error(const SmoothFunction& f,
                                             std::span<const double> lo,
                                             std::span<const double> hi, double delta0,
                                             int smoothness, int levels = 4,
                                             int samples = 2000,
                                             std::uint64_t seed = 0x9d2c5680);

}  // namespace wfstein
