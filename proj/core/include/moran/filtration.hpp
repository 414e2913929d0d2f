#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "moran/construction.hpp"
#include "moran/measure.hpp"
#include "moran/realization.hpp"
#include "moran/word.hpp"

namespace moran {

/// Scales γ_n >= δ_n and level collections 𝒬_n of disjoint cylinders.
///
/// Threshold filtrations (built from a construction) keep 𝒬_n implicit:
/// 𝒬_n = {j : diam(E_j) <= γ_n < diam(E_{j^-})}, queried through
/// is_member / member_containing / AntichainRefiner. Hand-built filtrations
/// store explicit word lists.
class GeneralFiltration {
 public:
  enum class Source { symbolic, realization, hand_built };

  std::size_t depth() const { return log_gamma_.size(); }
  Source source() const { return source_; }
  double c0() const { return c0_; }

  /// 1-based level n.
  double log_gamma(std::size_t n) const { return log_gamma_.at(n - 1); }
  double log_delta(std::size_t n) const { return log_delta_.at(n - 1); }
  const std::vector<double>& log_gammas() const { return log_gamma_; }
  const std::vector<double>& log_deltas() const { return log_delta_; }

  /// k(n) used in δ_n = C0 γ_n^{k/(k-1)}, n = 1..depth.
  const std::vector<std::size_t>& exponents() const { return k_; }
  /// Threshold level N_k for k = 2, 3, ... (entry k - 2); only k values
  /// reached within the depth are listed.
  const std::vector<std::size_t>& thresholds() const { return thresholds_; }

  /// The construction the cylinders belong to (absent for hand-built
  /// filtrations without one).
  const ConstructionSpec* spec() const { return spec_ ? &*spec_ : nullptr; }

  /// log diam(E_word) as used for the threshold test.
  double log_diameter(const Word& word) const;
  /// Diameter override passed to AntichainRefiner (null for spec diameters).
  const std::function<double(const Word&)>& diameter_override() const { return log_diameter_; }
  /// Threshold log γ_n + tie tolerance.
  double log_threshold(std::size_t n) const;

  bool is_member(std::size_t n, const Word& word) const;
  /// The member of 𝒬_n that is a prefix of `path`; throws InvalidArgument
  /// when `path` ends before reaching one.
  Word member_containing(std::size_t n, const Word& path) const;
  /// Every member of 𝒬_n in lexicographic order; throws beyond `cap`.
  std::vector<Word> members(std::size_t n, std::uint64_t cap = 1u << 22) const;
  /// log #𝒬_n.
  double log_member_count(std::size_t n) const;

  const std::vector<std::vector<Word>>& explicit_levels() const { return explicit_levels_; }

  friend GeneralFiltration build_symbolic_filtration(const ConstructionSpec&, std::size_t, double);
  friend GeneralFiltration build_filtration(const IntervalRealization&, std::size_t);
  friend GeneralFiltration hand_built_filtration(std::vector<double>, std::vector<double>,
                                                 std::vector<std::vector<Word>>, double,
                                                 std::optional<ConstructionSpec>);

 private:
  GeneralFiltration() = default;

  Source source_ = Source::symbolic;
  double c0_ = 0.5;
  std::vector<double> log_gamma_;
  std::vector<double> log_delta_;
  std::vector<std::size_t> k_;
  std::vector<std::size_t> thresholds_;
  std::optional<ConstructionSpec> spec_;
  std::function<double(const Word&)> log_diameter_;
  std::vector<std::vector<Word>> explicit_levels_;
};

/// Threshold filtration of the symbolic space with the cylinder diameters
/// of `spec`. Every cylinder contains a symbolic ball of half its diameter,
/// hence the default C0 = 1/2.
GeneralFiltration build_symbolic_filtration(const ConstructionSpec& spec, std::size_t depth, double c0 = 0.5);

/// Threshold filtration of a realization: γ_n from realized diameters, N_k
/// from the realized offspring-diameter quotients, C0 from the certified
/// inradius ratio. Throws InvalidArgument when depth exceeds the realized
/// depth and AxiomViolation when the realization fails M1 or M3.
GeneralFiltration build_filtration(const IntervalRealization& realization, std::size_t depth);

/// Explicit filtration (gamma/delta given directly, not logged).
GeneralFiltration hand_built_filtration(std::vector<double> gamma, std::vector<double> delta,
                                        std::vector<std::vector<Word>> levels, double c0,
                                        std::optional<ConstructionSpec> spec = std::nullopt);

/// Convergence of a ratio sequence to 1 judged on a window.
struct RatioTrend {
  std::vector<double> ratios;     ///< full sequence
  double final_deviation = 0.0;   ///< |ratio - 1| at the last index
  double extrapolated_deviation = 0.0;
  bool decreasing = true;
  bool pass = true;
};

struct FiltrationAxiomReport {
  bool f1 = true;
  std::size_t f1_first_violation = 0;  ///< level n, 0 when none
  bool f2 = true;
  RatioTrend f3;  ///< log δ_n / log δ_{n+1}
  RatioTrend f4;  ///< log γ_n / log δ_n
  /// Members pairwise disjoint (antichain) on every explicit level.
  bool disjoint = true;
  std::vector<std::string> diagnostics;

  bool hard_failure() const { return !f1; }
  bool all_pass() const { return f1 && f2 && f3.pass && f4.pass && disjoint; }
};

/// Requires depth >= 2 * trend_window >= 4. F3/F4 pass when the deviation
/// from 1 decreases over the last trend_window levels (half-window means)
/// and its 1/n extrapolation is below 1e-2.
FiltrationAxiomReport verify_filtration_axioms(const GeneralFiltration& filtration, std::size_t trend_window);

struct LocalDimensionEstimate {
  double lower = 0.0;
  double upper = 0.0;
  /// log μ(Q_n(x)) / log δ_n for n = 1..depth.
  std::vector<double> ratios;
  std::size_t tail_window = 0;
};

/// Tail min/max of log μ(Q_n(x)) / log δ_n along the path. tail_window = 0
/// selects 20% of the depth. Throws InvalidArgument when the path is too
/// short or the path weights equal 1 over the whole tail (an atom).
LocalDimensionEstimate local_dim_via_filtration(const MoranMeasure& measure, const GeneralFiltration& filtration,
                                                const Word& path_prefix, std::size_t tail_window = 0);

/// Columns n, gamma_n, delta_n, level_size, F3_ratio, F4_ratio.
std::string filtration_summary_csv(const GeneralFiltration& filtration);

}  // namespace moran
