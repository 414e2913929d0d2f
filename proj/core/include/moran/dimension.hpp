#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "moran/construction.hpp"
#include "moran/word.hpp"

namespace moran {

inline constexpr double kDefaultSolverTolerance = 1e-12;
inline constexpr int kMaxBisectionSteps = 200;

/// F_n(s) = Σ_{k<=n} log Σ_i c_{k,i}^s, accumulated level by level. Levels
/// with identical ratio lists share one term, so evaluation cost depends on
/// the number of distinct levels rather than on n.
class LevelEquation {
 public:
  explicit LevelEquation(const ConstructionSpec& spec);

  /// Adds levels until n levels are included.
  void extend_to(std::size_t n);
  std::size_t levels() const { return levels_; }

  double operator()(double s) const;
  /// Σ_{k<=n} log N_k = F_n(0).
  double log_count() const;

 private:
  struct Term {
    std::vector<double> log_ratios;
    bool equal_ratios = false;
    double multiplicity = 0.0;
  };

  const ConstructionSpec* spec_;
  std::size_t levels_ = 0;
  std::vector<Term> terms_;
};

/// Root of a strictly decreasing function with f(0) >= 0: bracket [0,1]
/// grown by doubling, then bisection with early exit once |f| <= tolerance.
/// Throws NonConvergence when the final residual exceeds 1e-10.
double solve_decreasing_root(const std::function<double(double)>& f, double tolerance = kDefaultSolverTolerance);

/// The unique s >= 0 with Π_{k<=n} Σ_i c_{k,i}^s = 1.
double solve_level_dimension(const ConstructionSpec& spec, std::size_t n,
                             double tolerance = kDefaultSolverTolerance);

/// Same equation over the realized (perturbed) diameters: Σ_{i∈Σ_n} 𝚌_i^s = 1,
/// by enumerating Σ_n. Equals solve_level_dimension for unperturbed specs.
double solve_realized_level_dimension(const ConstructionSpec& spec, std::size_t n,
                                      std::uint64_t enumeration_cap = 1u << 22,
                                      double tolerance = kDefaultSolverTolerance);

struct DimensionReport {
  std::vector<double> s_sequence;  ///< s_1 .. s_{n_max}
  std::vector<double> residuals;   ///< F_n(s_n)
  double s_star = 0.0;             ///< min over the tail window (liminf estimate)
  double s_upper_star = 0.0;       ///< max over the tail window (limsup estimate)
  std::size_t tail_window = 0;
  double solver_tolerance = kDefaultSolverTolerance;
  /// max - min of s_n over the last window and over the window before it
  /// (NaN when n_max < 2 * tail_window). Non-shrinking amplitudes signal that
  /// s_* and s^* are genuinely apart.
  double oscillation_last = 0.0;
  double oscillation_previous = 0.0;
};

DimensionReport dimension_report(const ConstructionSpec& spec, std::size_t n_max, std::size_t tail_window,
                                 double tolerance = kDefaultSolverTolerance);

struct HomogeneousDimension {
  double liminf_estimate = 0.0;
  double limsup_estimate = 0.0;
  /// r_n = Σ_{k<=n} log N_k / -Σ_{k<=n} log c_k for n = 1..n_max.
  std::vector<double> ratios;
};

/// Closed form for homogeneous specs. Throws InvalidArgument otherwise.
HomogeneousDimension homogeneous_dimension(const ConstructionSpec& spec, std::size_t n_max,
                                           std::size_t tail_window);

enum class CoverClaim {
  /// Σ_{Σ_k} 𝚌^s <= Σ_{cover} 𝚌^s for some k (any cover).
  covering,
  /// Σ_{Σ_k} 𝚌^s >= Σ_{cover} 𝚌^s for some k (pairwise disjoint cover).
  packing,
};

struct CoverWitness {
  std::size_t level = 0;
  std::size_t min_level = 0;  ///< k_1
  std::size_t max_level = 0;  ///< k_2
  double cover_log_sum = 0.0;
  /// log Σ_{Σ_k} 𝚌^s for k = k_1..k_2.
  std::vector<double> level_log_sums;
};

/// True when every word of length max|w| has an ancestor-or-self in `cover`.
bool is_symbolic_cover(const ConstructionSpec& spec, std::span<const Word> cover);
/// True when no word of `words` is a prefix of another (disjoint cylinders).
bool is_antichain(std::span<const Word> words);

/// Exhaustive search for the level of the covering/packing comparison.
/// Throws InvalidArgument for a non-cover (or, for the packing claim, a
/// cover with nested words) and AxiomViolation when no level qualifies.
CoverWitness cover_comparison_witness(const ConstructionSpec& spec, std::span<const Word> cover, double s,
                                      CoverClaim claim = CoverClaim::covering);

}  // namespace moran
