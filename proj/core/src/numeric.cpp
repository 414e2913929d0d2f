#include "moran/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <fmt/format.h>

#include "moran/error.hpp"

namespace moran::numeric {

void CompensatedSum::add(double value) {
  const double t = sum_ + value;
  if (std::abs(sum_) >= std::abs(value)) {
    compensation_ += (sum_ - t) + value;
  } else {
    compensation_ += (value - t) + sum_;
  }
  sum_ = t;
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

double log_sum_exp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  CompensatedSum acc;
  for (double v : values) acc.add(std::exp(v - hi));
  return hi + std::log(acc.value());
}

LinearFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw InvalidArgument("least_squares: need at least two paired samples");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw InvalidArgument("least_squares: abscissae are all equal");
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

TrendToZero trend_toward_zero(std::span<const double> ns, std::span<const double> values) {
  if (ns.size() != values.size() || values.empty()) {
    throw InvalidArgument("trend_toward_zero: need matching, non-empty samples");
  }
  TrendToZero out;
  out.final_value = values.back();
  const std::size_t half = values.size() / 2;
  if (half > 0) {
    double first = 0.0, second = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      first += values[i];
      second += values[values.size() - half + i];
    }
    out.decreasing = second <= first + 1e-12 * static_cast<double>(half);
  }
  if (values.size() < 2) {
    out.extrapolated = values.back();
    return out;
  }
  std::vector<double> inv(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) inv[i] = 1.0 / ns[i];
  out.extrapolated = least_squares(inv, values).intercept;
  return out;
}

std::pair<double, double> tail_min_max(std::span<const double> values, std::size_t window) {
  if (window == 0 || window > values.size()) {
    throw InvalidArgument("tail window must lie in [1, sequence length]");
  }
  const auto tail = values.last(window);
  const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
  return {*lo, *hi};
}

std::size_t default_tail_window(std::size_t length) {
  return std::max<std::size_t>(1, length / 5);
}

std::string format_from_log(double log_value) {
  if (log_value == kNegInf) return "0";
  if (!std::isfinite(log_value)) return log_value > 0 ? "inf" : "nan";
  const double log10_value = log_value / std::log(10.0);
  double exponent = std::floor(log10_value);
  double mantissa = std::pow(10.0, log10_value - exponent);
  if (mantissa >= 9.9999999999999995) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  return fmt::format("{:.15g}e{:+d}", mantissa, static_cast<long long>(exponent));
}

}  // namespace moran::numeric
