#include "moran/construction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include <fmt/format.h>

#include "moran/error.hpp"

namespace moran {
namespace {

// Levels validated eagerly at construction for rules without a finite
// description of their level set.
constexpr std::size_t kEagerValidationLevels = 64;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double max_ratio(const Level& level) {
  double m = 0.0;
  for (double c : level.ratios) m = std::max(m, c);
  return m;
}

}  // namespace

Level uniform_level(std::uint32_t branching, double ratio) {
  return Level{branching, std::vector<double>(branching, ratio)};
}

ConstructionSpec::ConstructionSpec(std::vector<Level> prefix, TailRule tail, ConstructionKind kind,
                                   double root_diameter,
                                   std::optional<JitterPerturbation> perturbation)
    : prefix_(std::move(prefix)),
      tail_(std::move(tail)),
      kind_(kind),
      root_diameter_(root_diameter),
      perturbation_(perturbation) {
  if (!(root_diameter_ > 0.0) || !std::isfinite(root_diameter_)) {
    throw InvalidArgument("root_diameter must be positive and finite");
  }
  for (std::size_t k = 1; k <= prefix_.size(); ++k) validate_level(prefix_[k - 1], k);

  // The set of levels the tail can produce, where it is finite; otherwise
  // the first few levels, the rest being validated on access.
  std::vector<Level> tail_levels;
  std::visit(
      [&](const auto& rule) {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, PeriodicTail>) {
          if (rule.cycle.empty()) throw InvalidArgument("periodic tail needs a non-empty cycle");
          tail_levels = rule.cycle;
        } else if constexpr (std::is_same_v<T, DoublingBlocksTail>) {
          tail_levels = {rule.first, rule.second};
        } else if constexpr (std::is_same_v<T, LogLinearTail>) {
          if (rule.offsets.empty() || rule.offsets.size() != rule.slopes.size()) {
            throw InvalidArgument("log_linear tail needs equally many offsets and slopes");
          }
          for (std::size_t i = 0; i < rule.offsets.size(); ++i) {
            if (!(rule.slopes[i] >= 0.0) || !(rule.offsets[i] + rule.slopes[i] > 0.0)) {
              throw InvalidArgument(
                  "log_linear tail: ratios leave (0,1); need slope >= 0 and offset + slope > 0");
            }
          }
          for (std::size_t k = 1; k <= kEagerValidationLevels; ++k) tail_levels.push_back(raw_level(prefix_.size() + k));
        } else {
          if (!rule.rule) throw InvalidArgument("custom tail has no rule");
          for (std::size_t k = 1; k <= kEagerValidationLevels; ++k) tail_levels.push_back(raw_level(prefix_.size() + k));
        }
      },
      tail_);
  for (std::size_t j = 0; j < tail_levels.size(); ++j) {
    validate_level(tail_levels[j], prefix_.size() + j + 1);
  }

  if (perturbation_) {
    const double amp = perturbation_->amplitude;
    if (!(amp >= 0.0) || !std::isfinite(amp)) {
      throw InvalidArgument("perturbation amplitude must be finite and non-negative");
    }
    double worst = 0.0;
    for (const auto& l : prefix_) worst = std::max(worst, max_ratio(l));
    for (const auto& l : tail_levels) worst = std::max(worst, max_ratio(l));
    if (!(worst * std::exp(amp) < 1.0)) {
      throw InvalidArgument("perturbation amplitude pushes a ratio to 1 or beyond");
    }
  }
}

double ConstructionSpec::log_root_diameter() const { return std::log(root_diameter_); }

Level ConstructionSpec::raw_level(std::size_t k) const {
  if (k == 0) throw InvalidArgument("levels are 1-based");
  if (k <= prefix_.size()) return prefix_[k - 1];
  const std::size_t pos = k - prefix_.size();
  return std::visit(
      [&](const auto& rule) -> Level {
        using T = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<T, PeriodicTail>) {
          return rule.cycle[(pos - 1) % rule.cycle.size()];
        } else if constexpr (std::is_same_v<T, DoublingBlocksTail>) {
          const auto block = std::bit_width(static_cast<std::uint64_t>(pos)) - 1;
          return block % 2 == 0 ? rule.first : rule.second;
        } else if constexpr (std::is_same_v<T, LogLinearTail>) {
          Level level;
          level.branching = static_cast<std::uint32_t>(rule.offsets.size());
          for (std::size_t i = 0; i < rule.offsets.size(); ++i) {
            level.ratios.push_back(std::exp(-(rule.offsets[i] + rule.slopes[i] * static_cast<double>(k))));
          }
          return level;
        } else {
          return rule.rule(k);
        }
      },
      tail_);
}

Level ConstructionSpec::level(std::size_t k) const {
  Level out = raw_level(k);
  // Finite-description tails were fully validated at construction.
  if (k > prefix_.size() && (std::holds_alternative<CustomTail>(tail_) ||
                             std::holds_alternative<LogLinearTail>(tail_))) {
    validate_level(out, k);
  }
  return out;
}

double ConstructionSpec::ratio(std::size_t k, Word::Index i) const {
  const Level l = level(k);
  if (i == 0 || i > l.branching) {
    throw InvalidArgument(fmt::format("index {} outside 1..{} at level {}", i, l.branching, k));
  }
  return l.ratios[i - 1];
}

void ConstructionSpec::validate_level(const Level& level, std::size_t k) const {
  if (level.branching < 1) {
    throw InvalidArgument(fmt::format("level {}: offspring count must be at least 1", k));
  }
  if (level.ratios.size() != level.branching) {
    throw InvalidArgument(fmt::format("level {}: expected {} ratios, got {}", k, level.branching,
                                      level.ratios.size()));
  }
  // A log-linear exponent is positive by construction; its ratio may underflow to 0.
  const bool may_underflow = k > prefix_.size() && std::holds_alternative<LogLinearTail>(tail_);
  for (double c : level.ratios) {
    if (!((c > 0.0 || (may_underflow && c == 0.0)) && c < 1.0)) {
      throw InvalidArgument(fmt::format("level {}: ratio {} not in (0,1)", k, c));
    }
  }
  if (kind_ == ConstructionKind::homogeneous) {
    for (double c : level.ratios) {
      if (c != level.ratios.front()) {
        throw InvalidArgument(
            fmt::format("level {}: homogeneous spec with index-dependent ratios", k));
      }
    }
  }
}

double ConstructionSpec::log_jitter(const Word& word) const {
  if (!perturbation_ || word.is_root()) return 0.0;
  std::uint64_t h = splitmix64(perturbation_->seed);
  for (auto i : word.indices()) h = splitmix64(h ^ i);
  // 53 random bits mapped to [-1, 1].
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return perturbation_->amplitude * (2.0 * u - 1.0);
}

std::vector<double> ConstructionSpec::log_ratios(std::size_t k) const {
  const Level l = level(k);
  std::vector<double> out(l.branching);
  if (const auto* rule = std::get_if<LogLinearTail>(&tail_); rule && k > prefix_.size()) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -(rule->offsets[i] + rule->slopes[i] * static_cast<double>(k));
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::log(l.ratios[i]);
  }
  return out;
}

double ConstructionSpec::realized_log_ratio(const Word& word) const {
  if (word.is_root()) throw InvalidArgument("the root has no contraction ratio");
  const Word::Index last = word.last();
  const auto logs = log_ratios(word.length());
  if (last == 0 || last > logs.size()) {
    throw InvalidArgument(fmt::format("index {} outside 1..{} at level {}", last, logs.size(), word.length()));
  }
  const double base = logs[last - 1];
  if (!perturbation_) return base;
  const double out = base + log_jitter(word);
  if (!(out < 0.0)) throw InvalidArgument("perturbed ratio left (0,1)");
  return out;
}

ConstructionSpec make_spec(std::function<std::uint32_t(std::size_t)> branching_rule,
                           std::function<double(std::size_t, Word::Index)> ratio_rule,
                           ConstructionKind kind, double root_diameter) {
  if (!branching_rule || !ratio_rule) throw InvalidArgument("make_spec: rules must be callable");
  CustomTail tail;
  tail.rule = [branching_rule, ratio_rule](std::size_t k) {
    Level level;
    level.branching = branching_rule(k);
    for (Word::Index i = 1; i <= level.branching; ++i) level.ratios.push_back(ratio_rule(k, i));
    return level;
  };
  return ConstructionSpec({}, std::move(tail), kind, root_diameter);
}

ConstructionSpec constant_spec(std::vector<double> ratios, double root_diameter) {
  if (ratios.empty()) throw InvalidArgument("constant_spec needs at least one ratio");
  bool equal = true;
  for (double c : ratios) equal = equal && c == ratios.front();
  Level level{static_cast<std::uint32_t>(ratios.size()), std::move(ratios)};
  return ConstructionSpec({}, PeriodicTail{{std::move(level)}},
                          equal ? ConstructionKind::homogeneous : ConstructionKind::spatially_symmetric,
                          root_diameter);
}

ConstructionSpec middle_thirds_spec() { return constant_spec({1.0 / 3.0, 1.0 / 3.0}); }

ConstructionSpec doubling_block_spec(Level first, Level second) {
  return ConstructionSpec({}, DoublingBlocksTail{std::move(first), std::move(second)},
                          ConstructionKind::homogeneous);
}

ConstructionSpec divergent_entropy_spec() {
  return ConstructionSpec({}, LogLinearTail{{1.0, 0.0}, {0.0, 1.0}},
                          ConstructionKind::spatially_symmetric);
}

std::string to_string(ConstructionKind kind) {
  return kind == ConstructionKind::homogeneous ? "homogeneous" : "spatially_symmetric";
}

ConstructionKind construction_kind_from_string(const std::string& text) {
  if (text == "homogeneous") return ConstructionKind::homogeneous;
  if (text == "spatially_symmetric") return ConstructionKind::spatially_symmetric;
  throw InvalidArgument("unknown construction kind '" + text + "'");
}

}  // namespace moran
