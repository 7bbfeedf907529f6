#include "wfstein/interpolator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace wfstein {

namespace {

// Numerators (over denominator 6) of the t-polynomials multiplying the n-th
// forward difference in the per-cell polynomial, n = 1..4.
constexpr long long kQ[5][8] = {
    {0, 0, 0, 0, 0, 0, 0, 0},        // n = 0 placeholder
    {0, 6, 0, 0, 0, 0, 0, 0},        // t
    {0, -3, 3, 0, 0, 0, 0, 0},       // -t/2 + t^2/2
    {0, 2, -3, 1, 0, 0, 0, 0},       // t/3 - t^2/2 + t^3/6
    {0, 0, 0, 0, -46, 123, -110, 33} // -23/3 t^4 + 41/2 t^5 - 55/3 t^6 + 11/2 t^7
};

long long difference_row(int n, int i) {
  // Coefficient of f(delta(k+i)) in D^n f(delta k).
  if (i < 0 || i > n) return 0;
  long long c = 1;
  for (int r = 1; r <= i; ++r) c = c * (n - r + 1) / r;
  return ((n - i) % 2 == 0) ? c : -c;
}

long long ipow(long long base, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

WeightKernel::WeightKernel() {
  for (int i = 0; i < kStencil; ++i) {
    for (int j = 0; j <= kDegree; ++j) {
      long long n = (i == 0 && j == 0) ? kDenominator : 0;
      for (int order = 1; order <= 4; ++order) {
        n += kQ[order][j] * difference_row(order, i);
      }
      num_[i][j] = n;
    }
  }
  finalize();
}

WeightKernel WeightKernel::from_table(
    const std::array<std::array<long long, kDegree + 1>, kStencil>& numerators) {
  WeightKernel k;
  k.num_ = numerators;
  k.finalize();
  return k;
}

void WeightKernel::finalize() {
  for (int i = 0; i < kStencil; ++i) {
    for (int j = 0; j <= kDegree; ++j) {
      coeff_[i][j] = static_cast<double>(num_[i][j]) / kDenominator;
    }
  }

  // Measured constants: sampled once over t in [0,1].
  constexpr int kSamples = 4096;
  sum_abs_bound_ = 0.0;
  max_abs_weight_.fill(0.0);
  for (int s = 0; s <= kSamples; ++s) {
    double t = static_cast<double>(s) / kSamples;
    double row_sum = 0.0;
    for (int i = 0; i < kStencil; ++i) {
      double v = std::abs(weight(i, t));
      max_abs_weight_[i] = std::max(max_abs_weight_[i], v);
      row_sum += v;
    }
    sum_abs_bound_ = std::max(sum_abs_bound_, row_sum);
  }

  // Per-order derivative bound: write the derivative row as a combination of
  // order-n differences at offsets m = 0..4-n and take max_t sum_m |gamma_m|.
  // The 5x(5-n) system is consistent because the derivative rows annihilate
  // polynomials of degree < n.
  deriv_bound_[0] = sum_abs_bound_;
  for (int n = 1; n <= 4; ++n) {
    double bound = 0.0;
    for (int s = 0; s <= kSamples; ++s) {
      double t = static_cast<double>(s) / kSamples;
      // Solve gamma from the triangular structure: matching coefficients of
      // f_{m+n} downward determines gamma_m sequentially.
      std::array<double, kStencil> row{};
      for (int i = 0; i < kStencil; ++i) row[i] = weight_derivative(i, n, t);
      std::array<double, kStencil> gamma{};
      for (int m = 4 - n; m >= 0; --m) {
        double v = row[m + n];
        for (int mm = m + 1; mm <= 4 - n; ++mm) {
          v -= gamma[mm] * static_cast<double>(difference_row(n, m + n - mm));
        }
        gamma[m] = v;  // difference_row(n, n) == 1
      }
      double sum = 0.0;
      for (int m = 0; m <= 4 - n; ++m) sum += std::abs(gamma[m]);
      bound = std::max(bound, sum);
    }
    deriv_bound_[n] = bound;
  }
}

double WeightKernel::weight(int i, double t) const {
  double acc = 0.0;
  for (int j = kDegree; j >= 0; --j) acc = acc * t + coeff_[i][j];
  return acc;
}

double WeightKernel::weight_derivative(int i, int order, double t) const {
  if (order == 0) return weight(i, t);
  double acc = 0.0;
  for (int j = kDegree; j >= order; --j) {
    double c = coeff_[i][j];
    for (int r = 0; r < order; ++r) c *= static_cast<double>(j - r);
    acc = acc * t + c;
  }
  return acc;
}

std::array<double, WeightKernel::kStencil> WeightKernel::weights(double t) const {
  std::array<double, kStencil> w;
  for (int i = 0; i < kStencil; ++i) w[i] = weight(i, t);
  return w;
}

std::vector<std::pair<std::string, bool>> WeightKernel::verify_identities() const {
  std::vector<std::pair<std::string, bool>> checks;

  bool interpolates = true;  // alpha_i(0) = [i == 0]
  for (int i = 0; i < kStencil; ++i) {
    if (num_[i][0] != (i == 0 ? kDenominator : 0)) interpolates = false;
  }
  checks.emplace_back("weights_interpolate_at_grid", interpolates);

  bool sum_one = true;  // sum_i alpha_i(t) == 1 coefficient-wise
  for (int j = 0; j <= kDegree; ++j) {
    long long s = 0;
    for (int i = 0; i < kStencil; ++i) s += num_[i][j];
    if (s != (j == 0 ? kDenominator : 0)) sum_one = false;
  }
  checks.emplace_back("weights_sum_to_one", sum_one);

  // Cell joins: value and first three t-derivatives at t=1 of cell k match
  // those at t=0 of cell k+1 (stencil shifted by one).
  bool joins = true;
  for (int n = 0; n <= 3; ++n) {
    for (int i = 0; i < kStencil + 1; ++i) {
      long long left = 0;  // n-th derivative coefficient of f_i at t=1, times 6
      if (i < kStencil) {
        for (int j = n; j <= kDegree; ++j) {
          long long c = num_[i][j];
          for (int r = 0; r < n; ++r) c *= (j - r);
          left += c;
        }
      }
      long long right = 0;  // same at t=0 in cell k+1, stencil f_1..f_5
      if (i >= 1) {
        long long c = num_[i - 1][n];
        for (int r = 2; r <= n; ++r) c *= r;  // n! * coeff_{t^n}
        right = c;
      }
      if (left != right) joins = false;
    }
  }
  checks.emplace_back("cells_join_with_c3_continuity", joins);

  // Cubic reproduction: sum_i i^m alpha_i(t) == t^m for m = 0..3.
  bool cubic = true;
  for (int m = 0; m <= 3; ++m) {
    for (int j = 0; j <= kDegree; ++j) {
      long long s = 0;
      for (int i = 0; i < kStencil; ++i) s += ipow(i, m) * num_[i][j];
      if (s != (j == m ? kDenominator : 0)) cubic = false;
    }
  }
  checks.emplace_back("cubic_polynomials_reproduced", cubic);

  return checks;
}

const WeightKernel& WeightKernel::instance() {
  static const WeightKernel kernel = [] {
    WeightKernel k;
    for (const auto& [name, ok] : k.verify_identities()) {
      if (!ok) {
        throw std::logic_error("WeightKernel: identity check failed: " + name);
      }
    }
    return k;
  }();
  return kernel;
}

Stencil1D weights_1d(double x, double delta, const WeightKernel& kernel) {
  if (delta <= 0.0) throw DomainError("weights_1d: delta must be > 0");
  Stencil1D s;
  double q = x / delta;
  double fl = std::floor(q);
  s.k = static_cast<long long>(fl);
  s.w = kernel.weights(q - fl);
  return s;
}

double eval_interpolant(const GridFunction& f, std::span<const double> x) {
  return eval_interpolant([&f](std::span<const int> c) { return f.at(c); }, x, f.delta());
}

double eval_derivative(const GridFunction& f, std::span<const double> x, const MultiIndex& a) {
  return eval_derivative([&f](std::span<const int> c) { return f.at(c); }, x, f.delta(), a);
}

namespace {

double axis_difference(const GridFunction& f, std::span<const int> base, int axis, int n) {
  std::vector<int> point(base.begin(), base.end());
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    point[axis] = base[axis] + i;
    acc += static_cast<double>(difference_row(n, i)) * f.at(point);
  }
  return acc;
}

}  // namespace

double tilde_delta(const GridFunction& f, std::span<const int> base_counts, int axis,
                   int order_j) {
  switch (order_j) {
    case 0:
      return f.at(base_counts);
    case 1:
      return axis_difference(f, base_counts, axis, 1) -
             0.5 * axis_difference(f, base_counts, axis, 2) +
             axis_difference(f, base_counts, axis, 3) / 3.0;
    case 2:
      return axis_difference(f, base_counts, axis, 2) -
             axis_difference(f, base_counts, axis, 3);
    case 3:
      return axis_difference(f, base_counts, axis, 3);
    default:
      throw std::invalid_argument("tilde_delta: order must be in 0..3");
  }
}

double tilde_delta_multi(const GridFunction& f, std::span<const int> base_counts,
                         const MultiIndex& a) {
  const int d = f.dim();
  if (static_cast<int>(a.size()) != d) {
    throw std::invalid_argument("tilde_delta_multi: dimension mismatch");
  }
  // Apply the one-axis combinations axis by axis; they commute. Expanding the
  // composition needs f on the box base..base+3e, which the zero extension
  // supplies.
  std::function<double(std::vector<int>&, int)> rec = [&](std::vector<int>& base,
                                                          int axis) -> double {
    if (axis == d) return f.at(base);
    // Weights of tilde^{(a_axis)} on the shifts 0..3 along `axis`, assembled
    // from the binomial difference rows.
    double row[4] = {0, 0, 0, 0};
    if (a[axis] == 0) {
      row[0] = 1.0;
    } else if (a[axis] == 1) {
      for (int i = 0; i <= 1; ++i) row[i] += difference_row(1, i);
      for (int i = 0; i <= 2; ++i) row[i] -= 0.5 * difference_row(2, i);
      for (int i = 0; i <= 3; ++i) row[i] += difference_row(3, i) / 3.0;
    } else if (a[axis] == 2) {
      for (int i = 0; i <= 2; ++i) row[i] += difference_row(2, i);
      for (int i = 0; i <= 3; ++i) row[i] -= difference_row(3, i);
    } else if (a[axis] == 3) {
      for (int i = 0; i <= 3; ++i) row[i] += difference_row(3, i);
    } else {
      throw std::invalid_argument("tilde_delta_multi: per-axis order must be <= 3");
    }
    double acc = 0.0;
    int saved = base[axis];
    for (int i = 0; i < 4; ++i) {
      if (row[i] == 0.0) continue;
      base[axis] = saved + i;
      acc += row[i] * rec(base, axis + 1);
    }
    base[axis] = saved;
    return acc;
  };
  std::vector<int> base(base_counts.begin(), base_counts.end());
  return rec(base, 0);
}

ProductDecomposition product_decomposition(const GridFunction& f, const GridFunction& g,
                                           std::span<const double> x) {
  ProductDecomposition out;
  double af = eval_interpolant(f, x);
  double ag = eval_interpolant(g, x);
  out.main = af * ag;
  auto product = [&f, &g](std::span<const int> c) { return f.at(c) * g.at(c); };
  double afg = eval_interpolant(product, x, f.delta());
  out.eps = afg - out.main;
  return out;
}

InterpolationErrorReport interpolation_error(const SmoothFunction& f,
                                             std::span<const double> lo,
                                             std::span<const double> hi, double delta0,
                                             int smoothness, int levels, int samples,
                                             std::uint64_t seed) {
  if (smoothness < 1 || smoothness > 4) {
    throw std::invalid_argument("interpolation_error: smoothness must be 1..4");
  }
  const int d = static_cast<int>(lo.size());
  InterpolationErrorReport report;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> points(samples, std::vector<double>(d));
  for (auto& pt : points) {
    for (int j = 0; j < d; ++j) pt[j] = lo[j] + (hi[j] - lo[j]) * unit(rng);
  }

  double delta = delta0;
  for (int level = 0; level < levels; ++level) {
    auto lattice_fn = [&f, delta, d](std::span<const int> k) {
      std::vector<double> x(d);
      for (int j = 0; j < d; ++j) x[j] = delta * static_cast<double>(k[j]);
      return f.value(x);
    };
    double max_err = 0.0;
    for (const auto& pt : points) {
      double err = std::abs(f.value(pt) - eval_interpolant(lattice_fn, pt, delta));
      max_err = std::max(max_err, err);
    }
    report.deltas.push_back(delta);
    report.max_errors.push_back(max_err);
    delta /= 2.0;
  }

  std::vector<double> log_d(report.deltas.size()), log_e(report.deltas.size());
  for (std::size_t i = 0; i < report.deltas.size(); ++i) {
    log_d[i] = std::log(report.deltas[i]);
    log_e[i] = std::log(std::max(report.max_errors[i], 1e-300));
  }
  report.fitted_order = least_squares(log_d, log_e).slope;
  return report;
}

}  // namespace wfstein
