#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "moran/measure.hpp"
#include "moran/word.hpp"

namespace moran {

/// Local entropy averages along one path: for levels k = 1..N the offspring
/// sums Σ_{j ≺ i|_{k-1}} p_j log p_j and Σ p_j log c_j, accumulated.
struct EntropyAverageTrace {
  Word path;
  std::size_t depth = 0;
  double numerator = 0.0;
  double denominator = 0.0;
  double ratio = 0.0;
  /// Partial sums after each level (index k-1 holds the sum over levels 1..k).
  std::vector<double> numerator_partial;
  std::vector<double> denominator_partial;
};

/// Requires |path_prefix| >= N >= 1. Uses 0·log 0 = 0 and realized ratios.
/// Throws InvalidArgument when the path enters a zero-mass cylinder.
EntropyAverageTrace entropy_average_ratio(const MoranMeasure& measure, const Word& path_prefix, std::size_t N);

enum class SeriesVerdict { plausibly_convergent, diverging };

const char* to_string(SeriesVerdict verdict);

struct ConditionReport {
  /// Summands n^-2 sup_{i∈Σ_n} Σ_{j≺i} p_j((log p_j)^2 + (log c_j)^2), n = 1..n_max.
  std::vector<double> l2_summands;
  std::vector<double> l2_partial_sums;
  /// min over sampled paths of -(1/n) log diam(E_{i|_n}), n = 1..n_max.
  std::vector<double> diamspeed_values;
  /// True when every sup was exact (level-indexed data or enumerable level).
  bool sup_exact = true;
  /// Log-log slope of the summands over the last decade of n.
  double decay_slope = 0.0;
  SeriesVerdict verdict = SeriesVerdict::plausibly_convergent;
  /// Minimum of diamspeed over the tail window (positive when the diameters
  /// shrink exponentially along every sampled path).
  double diamspeed_liminf_estimate = 0.0;
};

/// Slopes below this count as n^-2-type decay.
inline constexpr double kConvergentDecaySlope = -1.5;
inline constexpr std::uint64_t kSupEnumerationCap = 1'000'000;

/// Partial sums of the square-summability series and diameter speeds.
/// `path_sample` paths (drawn from the measure with `seed`) feed the
/// diameter speeds and, for non-enumerable word-dependent levels, the sup.
ConditionReport check_entropy_conditions(const MoranMeasure& measure, std::size_t n_max,
                                         std::size_t path_sample = 32, std::uint64_t seed = 0);

}  // namespace moran
