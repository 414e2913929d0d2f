#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "moran/filtration.hpp"
#include "moran/measure.hpp"
#include "moran/word.hpp"

namespace moran {

struct LqOptions {
  /// Local spectrum around the point x_path (with `radius`); global when absent.
  std::optional<Word> x_path;
  std::optional<double> radius;
  /// Levels evaluated; 0 means the filtration depth.
  std::size_t depth = 0;
  /// 0 means 20% of the depth.
  std::size_t tail_window = 0;
};

struct LqSpectrumEstimate {
  double q = 0.0;
  /// log Σ_{Q∈𝒬_n(x,r)} μ(Q)^q / log δ_n for n = 1..depth.
  std::vector<double> tau_sequence;
  /// Tail-window minimum (liminf estimate).
  double tau = 0.0;
  std::size_t tail_window = 0;
  bool local = false;
};

/// τ_q estimates for several q sharing one pass over the filtration. The
/// local variant uses the symbolic metric: Q meets the ρ-ball B(x, r) iff Q
/// contains x or the common prefix of Q and x has 𝚌 <= r. Throws for q < 0.
std::vector<LqSpectrumEstimate> lq_spectrum_multi(const MoranMeasure& measure, const GeneralFiltration& filtration,
                                                  std::span<const double> qs, const LqOptions& options = {});

LqSpectrumEstimate lq_spectrum_symbolic(const MoranMeasure& measure, const GeneralFiltration& filtration, double q,
                                        const LqOptions& options = {});

/// Local spectra at x over a decreasing radius grid, one estimate per radius.
std::vector<LqSpectrumEstimate> lq_spectrum_local(const MoranMeasure& measure, const GeneralFiltration& filtration,
                                                  double q, const Word& x_path, std::span<const double> radii,
                                                  std::size_t depth = 0, std::size_t tail_window = 0);

struct LqDimension {
  double q = 0.0;
  double dimension = 0.0;
  LqSpectrumEstimate spectrum;
};

/// τ_q / (q - 1) on the symbolic filtration of the measure's spec. Throws
/// InvalidArgument at q = 1 (undefined) and for q < 0.
LqDimension lq_dimension(const MoranMeasure& measure, double q, std::size_t depth, std::size_t tail_window = 0);

/// Dimensions for every q of a grid (none equal to 1), one filtration pass.
std::vector<LqDimension> lq_dimensions(const MoranMeasure& measure, std::span<const double> qs, std::size_t depth,
                                       std::size_t tail_window = 0);

inline constexpr double kSandwichSlack = 1e-3;
std::vector<double> default_q_grid();

struct SandwichReport {
  std::vector<LqDimension> dimensions;
  /// Grid points nearest to 1 from above and below.
  double q_above = 0.0;
  double q_below = 0.0;
  double dim_above = 0.0;  ///< dim_q at q_above (bounds lower local dims from below)
  double dim_below = 0.0;  ///< dim_q at q_below (bounds upper local dims from above)
  /// Entropy-average tail min/max along each sampled path.
  std::vector<double> lower_local;
  std::vector<double> upper_local;
  bool sandwich_holds = true;
  /// q -> dim_q nonincreasing on each side of 1 (within slack).
  bool monotone = true;
  double slack = kSandwichSlack;
};

/// dim_{q↓1} <= lower local <= upper local <= dim_{q↑1} on μ-sampled paths.
/// The grid must contain points on both sides of 1 and not 1 itself.
/// path_depth = 0 uses `depth` for the entropy averages too.
SandwichReport dim_at_one_sandwich_check(const MoranMeasure& measure, std::size_t depth,
                                         std::span<const double> q_grid, double slack = kSandwichSlack,
                                         std::size_t paths = 8, std::uint64_t seed = 0, std::size_t path_depth = 0);

}  // namespace moran
