#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "moran/measure.hpp"
#include "moran/realization.hpp"
#include "moran/word.hpp"

namespace moran {

/// Sorted sample of points on the line.
struct PointCloud {
  std::vector<double> points;
  std::string provenance;
};

/// Sorts and validates (finite values, non-empty).
PointCloud make_point_cloud(std::vector<double> points, std::string provenance = {});
/// Midpoints of every level-`depth` interval.
PointCloud cylinder_midpoints(const IntervalRealization& realization, std::size_t depth);
/// `count` μ-sampled points (see sample_points).
PointCloud sampled_cloud(const IntervalRealization& realization, const MoranMeasure& measure, std::size_t count,
                         std::uint64_t seed);

/// Strictly decreasing radii r_0, r_0·base, r_0·base², ...
struct ScaleRange {
  std::vector<double> r_values;
  double base = 0.0;
};

/// `count` radii starting at `largest`; base in (0, 1). When `bound` > 0
/// every radius must lie below it.
ScaleRange geometric_scales(double largest, double base, std::size_t count, double bound = 0.0);

struct BoxCountResult {
  double slope = 0.0;
  double residual = 0.0;
  /// Mean of the two grid phases, per scale.
  std::vector<double> counts;
  std::vector<std::size_t> counts_offset_zero;
  std::vector<std::size_t> counts_offset_half;
  std::string warning;
};

/// Occupied boxes [m r, (m+1) r) at offsets 0 and r/2, averaged, with the
/// least-squares slope of log count against log(1/r). Needs >= 4 scales.
/// A cloud of identical points yields slope 0 and a warning.
BoxCountResult box_count_dimension(const PointCloud& cloud, const ScaleRange& scales);

/// log μ([x - r, x + r]) summed over the realized cylinders: cylinders inside
/// the ball count fully, straddling ones are refined down to the realized
/// depth, where they count when they meet the ball.
double ball_log_mass(const MoranMeasure& measure, const IntervalRealization& realization, double x, double r);

struct LocalSlopeEstimate {
  double lower = 0.0;
  double upper = 0.0;
  /// log μ(B(x, r)) / log r per scale.
  std::vector<double> ratios;
  std::size_t tail_window = 0;
};

/// Throws InvalidArgument when x lies outside the root interval.
LocalSlopeEstimate local_dimension_slope(const MoranMeasure& measure, const IntervalRealization& realization,
                                         double x, const ScaleRange& scales, std::size_t tail_window = 0);

struct SqPackingResult {
  double value = 0.0;
  std::size_t cardinality = 0;
  std::vector<double> centers;
  std::vector<double> masses;
  bool mass_greedy = false;  ///< the mass-ordered packing gave the larger sum
  /// Every support point lies within 2δ of a chosen center.
  bool maximal = true;
};

/// Greedy δ-packing of the support points (endpoints of positive-mass
/// cylinders at the realized depth) inside [region_left, region_right] with
/// closed balls of radius δ (disjoint iff centers are more than 2δ apart).
/// For q >= 1 a mass-ordered greedy packing is tried too and the larger sum
/// kept. 0^q counts as 0 for every q.
SqPackingResult sq_packing_sum(const MoranMeasure& measure, const IntervalRealization& realization,
                               double region_left, double region_right, double q, double delta);

struct BallCover {
  /// Union of the crossing words, sorted, without duplicates.
  std::vector<Word> words;
  /// Crossing words meeting each ball.
  std::vector<std::size_t> per_ball;
  std::size_t max_per_ball = 0;
};

/// For each ball [a, b] the words i with E_i ∩ B ≠ ∅ and diam(E_i) <= b - a
/// < diam(E_{i^-}). Throws InvalidArgument when the balls miss a realized
/// cylinder or a ball is smaller than every realized cylinder it meets.
BallCover ball_to_cylinder_cover(const IntervalRealization& realization, const std::vector<Interval>& balls);

std::string box_count_csv(const ScaleRange& scales, const BoxCountResult& result);
std::string local_slope_csv(const ScaleRange& scales, const LocalSlopeEstimate& result);

}  // namespace moran
