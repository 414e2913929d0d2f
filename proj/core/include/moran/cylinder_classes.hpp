#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "moran/construction.hpp"
#include "moran/measure.hpp"
#include "moran/word.hpp"

namespace moran {

/// Words sharing length, log diameter and log mass, kept as one entry with
/// a (log) multiplicity. Zero-mass words carry log_mass = -inf.
struct CylinderClass {
  std::size_t length = 0;
  double log_diameter = 0.0;
  double log_mass = 0.0;
  double log_multiplicity = 0.0;
  /// One word of the class.
  Word representative;
};

/// Maintains the diameter-crossing antichain {j : log diam(E_j) <= t <
/// log diam(E_{j^-})} below a start word as the threshold t decreases.
///
/// When diameters and masses depend only on (level, index), words with equal
/// (length, log diameter, log mass) are merged, so homogeneous constructions
/// keep one class per level and two-ratio constructions O(length) classes.
/// Otherwise every word is its own class and `class_cap` bounds the work.
class AntichainRefiner {
 public:
  /// `measure` may be null (masses then stay at 0). `log_diameter` overrides
  /// the spec diameters; it forces word-by-word refinement.
  AntichainRefiner(const ConstructionSpec& spec, const MoranMeasure* measure, Word start,
                   std::function<double(const Word&)> log_diameter = nullptr, std::uint64_t class_cap = 1u << 22);

  /// Refines to threshold `log_threshold`. Thresholds must not increase
  /// between calls. Throws InvalidArgument when the class cap is exceeded.
  const std::vector<CylinderClass>& refine(double log_threshold);
  const std::vector<CylinderClass>& classes() const { return frontier_; }

  bool merging() const { return merge_; }

  /// log Σ_{classes} multiplicity · mass^q over positive-mass classes.
  double log_moment(double q) const;
  /// log of the number of words in the antichain (zero-mass words included).
  double log_count() const;

 private:
  struct LevelData {
    std::vector<double> log_ratios;
    std::vector<double> log_weights;
  };
  const LevelData& level_data(std::size_t k);
  void expand(const CylinderClass& cls, std::vector<CylinderClass>& out);

  const ConstructionSpec* spec_;
  const MoranMeasure* measure_;
  std::function<double(const Word&)> log_diameter_;
  std::uint64_t class_cap_;
  bool merge_ = true;
  double last_threshold_;
  std::vector<CylinderClass> frontier_;
  std::map<std::size_t, LevelData> levels_;
};

}  // namespace moran
