#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "moran/word.hpp"

namespace moran {

enum class ConstructionKind { homogeneous, spatially_symmetric };

/// Offspring count N_k and contraction ratios c_{k,1..N_k} of one level.
struct Level {
  std::uint32_t branching = 1;
  std::vector<double> ratios;

  friend bool operator==(const Level&, const Level&) = default;
};

/// Level with N equal ratios.
Level uniform_level(std::uint32_t branching, double ratio);

// Tail rules extend the explicit prefix to arbitrary depth. `k` below is the
// absolute level for LogLinearTail and CustomTail, and the position after
// the explicit prefix (1-based) for the other two.

/// Repeats `cycle` forever.
struct PeriodicTail {
  std::vector<Level> cycle;
};

/// Alternating blocks of lengths 1, 2, 4, 8, ...: block j uses `first` when
/// j is even and `second` when j is odd.
struct DoublingBlocksTail {
  Level first;
  Level second;
};

/// c_{k,i} = exp(-(offsets[i] + slopes[i] * k)), N_k = offsets.size().
struct LogLinearTail {
  std::vector<double> offsets;
  std::vector<double> slopes;
};

/// Arbitrary level rule. Not serializable.
struct CustomTail {
  std::function<Level(std::size_t)> rule;
  std::string label = "custom";
};

using TailRule = std::variant<PeriodicTail, DoublingBlocksTail, LogLinearTail, CustomTail>;

/// Bounded word-dependent distortion of the ratios: the realized ratio of
/// word i is c_{|i|, i_last} * exp(amplitude * u(i)) with u(i) in [-1, 1] a
/// deterministic hash of (seed, i). Turns a spatially symmetric spec into an
/// asymptotically spatially symmetric one.
struct JitterPerturbation {
  double amplitude = 0.0;
  std::uint64_t seed = 0;

  friend bool operator==(const JitterPerturbation&, const JitterPerturbation&) = default;
};

/// Symbolic parameters of a Moran construction: a lazily generated sequence
/// of levels plus the root diameter. Immutable.
class ConstructionSpec {
 public:
  ConstructionSpec(std::vector<Level> prefix, TailRule tail, ConstructionKind kind,
                   double root_diameter = 1.0,
                   std::optional<JitterPerturbation> perturbation = std::nullopt);

  /// Level k >= 1. Throws InvalidArgument when the rule yields an invalid level.
  Level level(std::size_t k) const;
  std::uint32_t branching(std::size_t k) const { return level(k).branching; }
  double ratio(std::size_t k, Word::Index i) const;
  /// log c_{k,1..N_k}. Exact for log-linear tails, whose ratios underflow a
  /// double once the exponent passes about 745.
  std::vector<double> log_ratios(std::size_t k) const;

  const std::vector<Level>& prefix_levels() const { return prefix_; }
  const TailRule& tail() const { return tail_; }
  ConstructionKind kind() const { return kind_; }
  double root_diameter() const { return root_diameter_; }
  double log_root_diameter() const;
  const std::optional<JitterPerturbation>& perturbation() const { return perturbation_; }

  /// True when realized ratios depend on the whole word, not only on
  /// (level, last index).
  bool word_dependent() const { return perturbation_.has_value(); }
  bool serializable() const { return !std::holds_alternative<CustomTail>(tail_); }

  /// log of the realized ratio diam(E_i)/diam(E_{i^-}) of a non-root word.
  double realized_log_ratio(const Word& word) const;
  /// The perturbation's log factor for a non-root word (0 without perturbation).
  double log_jitter(const Word& word) const;

 private:
  void validate_level(const Level& level, std::size_t k) const;
  Level raw_level(std::size_t k) const;

  std::vector<Level> prefix_;
  TailRule tail_;
  ConstructionKind kind_;
  double root_diameter_;
  std::optional<JitterPerturbation> perturbation_;
};

/// Spec built from arbitrary rules k -> N_k and (k, i) -> c_{k,i}.
ConstructionSpec make_spec(std::function<std::uint32_t(std::size_t)> branching_rule,
                           std::function<double(std::size_t, Word::Index)> ratio_rule,
                           ConstructionKind kind, double root_diameter = 1.0);

/// The same level at every depth. Kind is homogeneous when all ratios agree.
ConstructionSpec constant_spec(std::vector<double> ratios, double root_diameter = 1.0);

/// N_k = 2, c_{k,i} = 1/3.
ConstructionSpec middle_thirds_spec();

/// Homogeneous spec alternating `first`/`second` on blocks of doubling length.
ConstructionSpec doubling_block_spec(Level first, Level second);

/// Two offsprings with ratios e^{-1} and e^{-k} at level k: the spec whose
/// offspring entropy series fails to be square summable.
ConstructionSpec divergent_entropy_spec();

std::string to_string(ConstructionKind kind);
ConstructionKind construction_kind_from_string(const std::string& text);

}  // namespace moran
