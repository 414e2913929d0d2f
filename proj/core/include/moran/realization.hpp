#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "moran/construction.hpp"
#include "moran/measure.hpp"
#include "moran/word.hpp"

namespace moran {

/// Endpoint type. Quad precision keeps sibling gaps resolvable well below
/// the 1e-16 spacing of doubles near 1.
using Coordinate = __float128;

enum class GapRule {
  /// Slack (1 - Σc)ℓ split into N + 1 equal gaps, flanking and interior.
  uniform_gaps,
  /// Children placed contiguously from the left end; siblings touch.
  left_packed,
  /// First child at the left end, last at the right end, equal interior gaps.
  edge_anchored,
  /// The two-child ball construction on a uniformly perfect line.
  uniformly_perfect,
  /// Hand-specified intervals.
  explicit_map,
};

std::string to_string(GapRule rule);
GapRule gap_rule_from_string(const std::string& text);

struct Interval {
  Coordinate left = 0;
  Coordinate right = 0;
  /// Nominal diameter (root_diameter · 𝚌_i for rule-based placement).
  double length = 0.0;

  double midpoint() const { return static_cast<double>((left + right) / 2); }
};

class IntervalRealization {
 public:
  /// Rule-based realization of `spec` down to `depth`; endpoints are
  /// computed on demand by walking from the root.
  IntervalRealization(ConstructionSpec spec, GapRule rule, std::size_t depth);

  /// Hand-specified intervals. `depth` becomes the largest d such that every
  /// word of length <= d is present.
  static IntervalRealization from_intervals(ConstructionSpec spec,
                                            std::map<Word, std::pair<Coordinate, Coordinate>> intervals);

  const ConstructionSpec& spec() const { return spec_; }
  GapRule gap_rule() const { return rule_; }
  std::size_t depth() const { return depth_; }
  bool rule_based() const { return rule_ != GapRule::explicit_map; }
  /// Siblings share an endpoint somewhere (left_packed, or Σc = 1 under
  /// edge_anchored): M3 cannot hold.
  bool touching_flagged() const { return touching_; }
  /// Inradius / diameter lower bound; 1/2 for intervals.
  double c0_certified() const { return c0_; }
  double eta() const { return eta_; }

  /// Throws InvalidArgument for invalid words or words beyond depth().
  Interval interval(const Word& word) const;
  /// log diam(E_i): spec diameters for rule-based placement, interval
  /// lengths for explicit maps.
  double log_diameter(const Word& word) const;

  /// Offspring intervals of `word` (which has interval `parent`).
  std::vector<Interval> children(const Word& word, const Interval& parent) const;

 private:
  IntervalRealization(ConstructionSpec spec, GapRule rule, std::size_t depth, double eta);
  friend IntervalRealization uniformly_perfect_example(double eta, std::size_t depth);

  ConstructionSpec spec_;
  GapRule rule_ = GapRule::uniform_gaps;
  std::size_t depth_ = 0;
  bool touching_ = false;
  double c0_ = 0.5;
  double eta_ = 0.0;
  std::map<Word, Interval> explicit_;
};

IntervalRealization realize_on_interval(const ConstructionSpec& spec, GapRule rule, std::size_t depth);

/// The spec of the uniformly perfect example: two offsprings, root interval
/// of diameter 2, level-n diameters c^n with c = η²/3.
ConstructionSpec uniformly_perfect_spec(double eta);
/// The symmetric reference: c_{k,i} = η²/3 at every level.
ConstructionSpec uniformly_perfect_reference_spec(double eta);

/// E_∅ = [0, 2] (center 1, radius 1). Child 1 keeps the parent center,
/// child 2 sits at distance (1 + η/3)/2 · r_parent to the right; children of
/// a level-n word have radius c^{n+1}/2. Throws unless 0 < η < 1.
IntervalRealization uniformly_perfect_example(double eta, std::size_t depth);

/// Σ_{j<=n} log c_{i|_j} over realized diameters divided by the reference
/// sum Σ_{j<=n} log c_{j, i_j}, with n = |path|.
double asymptotic_symmetry_ratio(const IntervalRealization& realization, const ConstructionSpec& reference,
                                 const Word& path);

struct PointEstimate {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Midpoint of E_prefix with its half-length as error bound.
PointEstimate point_of(const IntervalRealization& realization, const Word& prefix);

struct MoranAxiomReport {
  std::size_t depth = 0;
  /// Levels for which M1, M3, M4 were checked word by word.
  std::size_t exact_depth = 0;
  bool m1 = true;
  bool m2 = true;
  bool m3 = true;
  bool m4 = true;
  bool m5 = true;
  double c0_certified = 0.5;
  /// max |interval length / nominal length - 1| over checked words.
  double max_length_error = 0.0;
  std::vector<double> max_log_diameters;  ///< n = 0..depth
  std::vector<double> m5_deviations;      ///< n = 0..depth (NaN where diam >= 1)
  double m5_final_deviation = 0.0;
  /// Intercept of the deviation regressed on 1/n over the window.
  double m5_extrapolated_deviation = 0.0;
  std::vector<std::string> diagnostics;

  bool hard_failure() const { return !m1 || !m3; }
  bool all_pass() const { return m1 && m2 && m3 && m4 && m5; }
};

inline constexpr std::uint64_t kAxiomEnumerationCap = 1u << 22;
inline constexpr double kTrendTolerance = 1e-2;

/// Never throws on axiom failures; see MoranAxiomReport::hard_failure.
MoranAxiomReport verify_moran_axioms(const IntervalRealization& realization, std::size_t depth,
                                     std::size_t m5_window);

/// `count` points x_i for words drawn from `measure` down to the realization
/// depth. Throws InvalidArgument when the measure lives on another spec.
std::vector<double> sample_points(const IntervalRealization& realization, const MoranMeasure& measure,
                                  std::size_t count, std::uint64_t seed);

/// True when both specs agree on root diameter, perturbation and levels 1..depth.
bool same_construction(const ConstructionSpec& a, const ConstructionSpec& b, std::size_t depth);

/// CSV rows "word,left,right" for every word up to `depth`.
std::string realization_csv(const IntervalRealization& realization, std::size_t depth);

}  // namespace moran
