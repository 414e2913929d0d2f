#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>

namespace moran::numeric {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// Two log-diameters closer than this are treated as equal when deciding
/// threshold crossings (cylinder diameters that agree in exact arithmetic
/// but were accumulated in different orders).
inline constexpr double kLogTieTolerance = 1e-9;

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double value);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// log(exp(a) + exp(b)), exact for -inf operands.
double log_add(double a, double b);

/// log Σ exp(values[i]); -inf for an empty span or all -inf.
double log_sum_exp(std::span<const double> values);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Root mean square of the fit residuals.
  double residual = 0.0;
};

/// Ordinary least squares of ys on xs. Requires at least two distinct xs.
LinearFit least_squares(std::span<const double> xs, std::span<const double> ys);

/// Deviation sequence d(n) -> 0 judged on a finite window: the value at the
/// last n, whether the second half of the window has a mean no larger than
/// the first half (sequences such as F3 ratios wiggle with period 2), and
/// the intercept of d regressed on 1/n (the extrapolated limit).
struct TrendToZero {
  double final_value = 0.0;
  double extrapolated = 0.0;
  bool decreasing = true;
};

TrendToZero trend_toward_zero(std::span<const double> ns, std::span<const double> values);

/// Minimum and maximum of the last `window` entries.
std::pair<double, double> tail_min_max(std::span<const double> values, std::size_t window);

/// Default tail window: 20% of the sequence length, at least one entry.
std::size_t default_tail_window(std::size_t length);

/// Decimal scientific text for exp(log_value) without passing through a
/// double that could underflow, e.g. 2^-4096.
std::string format_from_log(double log_value);

}  // namespace moran::numeric
