#include "moran/measure.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {
namespace {

constexpr double kWeightSumTolerance = 1e-12;
constexpr std::size_t kEagerWeightLevels = 64;

void check_weights(std::span<const double> p, std::size_t level, bool parent_live, std::size_t expected) {
  if (p.size() != expected) {
    throw InvalidArgument(fmt::format("level {}: expected {} weights, got {}", level, expected, p.size()));
  }
  numeric::CompensatedSum total;
  for (double w : p) {
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidArgument(fmt::format("level {}: weight {} outside [0,1]", level, w));
    total.add(w);
  }
  if (total.value() == 0.0 && !parent_live) return;
  if (std::abs(total.value() - 1.0) > kWeightSumTolerance) {
    throw InvalidArgument(fmt::format("level {}: offspring weights sum to {:.17g}, not 1", level, total.value()));
  }
}

}  // namespace

LevelWeights bernoulli_weights(std::vector<double> weights) { return LevelWeights{{std::move(weights)}, true}; }

MoranMeasure::MoranMeasure(ConstructionSpec spec, WeightRule rule, double root_mass)
    : spec_(std::move(spec)), rule_(std::move(rule)), root_mass_(root_mass) {
  if (!(root_mass_ > 0.0) || !std::isfinite(root_mass_)) throw InvalidArgument("root mass must be positive");
  if (auto* lw = std::get_if<LevelWeights>(&rule_)) {
    if (lw->levels.empty()) throw InvalidArgument("level weights: empty list");
    const std::size_t n = std::max(lw->levels.size(), kEagerWeightLevels);
    for (std::size_t k = 1; k <= n; ++k) level_weights(k);
  } else if (auto* cw = std::get_if<CustomWeights>(&rule_)) {
    if (!cw->rule) throw InvalidArgument("custom weights: rule is not callable");
  }
}

std::vector<double> MoranMeasure::level_weights(std::size_t k) const {
  if (k == 0) throw InvalidArgument("levels are 1-based");
  const std::size_t n = spec_.branching(k);
  std::vector<double> out;
  if (std::holds_alternative<UniformWeights>(rule_)) {
    out.assign(n, 1.0 / static_cast<double>(n));
  } else if (auto* lw = std::get_if<LevelWeights>(&rule_)) {
    const std::size_t m = lw->levels.size();
    const std::size_t idx = k <= m ? k - 1 : (lw->cycle ? (k - 1) % m : m - 1);
    out = lw->levels[idx];
  } else {
    throw InvalidArgument("level_weights: measure is not level-indexed");
  }
  check_weights(out, k, true, n);
  return out;
}

std::vector<double> MoranMeasure::offspring_weights(const Word& parent, bool parent_live) const {
  if (level_indexed()) return level_weights(parent.length() + 1);
  const auto& rule = std::get<CustomWeights>(rule_).rule;
  const std::size_t level = parent.length() + 1;
  const auto n = spec_.branching(level);
  std::vector<double> out(n);
  for (Word::Index i = 1; i <= n; ++i) out[i - 1] = rule(parent, i);
  check_weights(out, level, parent_live, n);
  return out;
}

double MoranMeasure::weight(const Word& word) const {
  if (word.is_root()) return root_mass_;
  if (level_indexed()) return level_weights(word.length())[word.last() - 1];
  return offspring_weights(word.parent(), false)[word.last() - 1];
}

MoranMeasure make_uniform_measure(const ConstructionSpec& spec) { return MoranMeasure(spec, UniformWeights{}); }

MoranMeasure make_weighted_measure(const ConstructionSpec& spec, WeightRule rule, double root_mass) {
  return MoranMeasure(spec, std::move(rule), root_mass);
}

double cylinder_log_mass(const MoranMeasure& measure, const Word& word) {
  require_valid_word(measure.spec(), word);
  numeric::CompensatedSum acc;
  acc.add(std::log(measure.root_mass()));
  Word parent;
  for (auto i : word.indices()) {
    const double p = measure.offspring_weights(parent, true)[i - 1];
    if (p == 0.0) return numeric::kNegInf;
    acc.add(std::log(p));
    parent.push_back(i);
  }
  return acc.value();
}

PathSampler::PathSampler(const MoranMeasure& measure, std::uint64_t seed) : measure_(&measure), state_(seed) {}

double PathSampler::uniform() {
  // splitmix64 stream: identical across platforms, unlike std distributions.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

Word PathSampler::sample(std::size_t depth) {
  Word word;
  for (std::size_t k = 0; k < depth; ++k) {
    const auto p = measure_->offspring_weights(word, true);
    double u = uniform();
    Word::Index pick = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      pick = static_cast<Word::Index>(i + 1);
      if (u < p[i]) break;
      u -= p[i];
    }
    word.push_back(pick);
  }
  return word;
}

}  // namespace moran
