#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "moran/construction.hpp"
#include "moran/word.hpp"

namespace moran {

/// p = 1/N at every offspring.
struct UniformWeights {};

/// Offspring weights depending only on the level: weights for level k are
/// levels[k-1] while k <= levels.size(); beyond that the list is cycled
/// (`cycle` = true) or its last entry repeats.
struct LevelWeights {
  std::vector<std::vector<double>> levels;
  bool cycle = true;
};

/// Arbitrary rule (parent word, offspring index) -> p. Not serializable.
struct CustomWeights {
  std::function<double(const Word& parent, Word::Index index)> rule;
  std::string label = "custom";
};

using WeightRule = std::variant<UniformWeights, LevelWeights, CustomWeights>;

/// Bernoulli-type rule: the same weight vector at every level.
LevelWeights bernoulli_weights(std::vector<double> weights);

/// Moran measure: conditional offspring masses p_{ij} on the codetree of a
/// spec. Cylinder masses are products of p along the word.
class MoranMeasure {
 public:
  MoranMeasure(ConstructionSpec spec, WeightRule rule, double root_mass = 1.0);

  const ConstructionSpec& spec() const { return spec_; }
  const WeightRule& rule() const { return rule_; }
  double root_mass() const { return root_mass_; }

  /// True when p_{ij} depends only on |i| + 1 and j.
  bool level_indexed() const { return !std::holds_alternative<CustomWeights>(rule_); }

  /// Weights at level k >= 1 of a level-indexed measure.
  std::vector<double> level_weights(std::size_t k) const;

  /// p_{parent i} for every offspring i of `parent`, validated: entries in
  /// [0,1] summing to 1 within 1e-12 (all zero accepted only below a
  /// zero-mass cylinder, which the caller signals via `parent_live`).
  std::vector<double> offspring_weights(const Word& parent, bool parent_live = true) const;

  /// p of a single non-root word (root_mass for the root).
  double weight(const Word& word) const;

 private:
  ConstructionSpec spec_;
  WeightRule rule_;
  double root_mass_;
};

MoranMeasure make_uniform_measure(const ConstructionSpec& spec);

/// Validates level weight lists eagerly (each used level up to the longer of
/// the list length and 64 levels); custom rules are validated on access.
MoranMeasure make_weighted_measure(const ConstructionSpec& spec, WeightRule rule, double root_mass = 1.0);

/// log μ(E_i) = Σ_{n<=|i|} log p_{i|_n}; -inf once a factor is zero.
double cylinder_log_mass(const MoranMeasure& measure, const Word& word);

/// Deterministic word of length `depth` drawn by choosing offsprings with
/// probabilities p at each level.
class PathSampler {
 public:
  PathSampler(const MoranMeasure& measure, std::uint64_t seed);
  Word sample(std::size_t depth);

 private:
  double uniform();

  const MoranMeasure* measure_;
  std::uint64_t state_;
};

}  // namespace moran
