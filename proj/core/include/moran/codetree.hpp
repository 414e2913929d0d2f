#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "moran/construction.hpp"
#include "moran/error.hpp"
#include "moran/word.hpp"

namespace moran {

bool is_valid_word(const ConstructionSpec& spec, const Word& word);
/// Throws InvalidArgument naming the first bad position.
void require_valid_word(const ConstructionSpec& spec, const Word& word);

/// i1, ..., iN_{|i|+1} in index order.
std::vector<Word> offsprings(const ConstructionSpec& spec, const Word& word);

/// log diam(E_i) = log(root_diameter) + Σ_j log c_{i|_j}, using realized
/// (possibly perturbed) ratios.
double cylinder_log_diameter(const ConstructionSpec& spec, const Word& word);

/// log(root_diameter) + Σ_j log c_{j, i_j}: the diameter under the
/// symmetric base weights, ignoring any perturbation.
double symmetric_log_diameter(const ConstructionSpec& spec, const Word& word);

/// Σ_j log c_{j, i_j} without the root diameter (log of the product 𝚌_i).
double log_ratio_product(const ConstructionSpec& spec, const Word& word);

/// Symbolic distance between the classes of two words. 0 when one word is a
/// prefix of the other (containment, including equality), 1 when the first
/// symbols differ, otherwise the product of base ratios along the longest
/// common prefix.
double rho_distance(const ConstructionSpec& spec, const Word& a, const Word& b);

/// log #Σ_n = Σ_{k<=n} log N_k.
double log_level_size(const ConstructionSpec& spec, std::size_t n);

/// #Σ_n, saturating at UINT64_MAX.
std::uint64_t level_size(const ConstructionSpec& spec, std::size_t n);

/// Calls visit(word) for every word of length exactly `n`, in lexicographic
/// order. Throws InvalidArgument if #Σ_n exceeds `cap`.
template <class Visitor>
void for_each_word(const ConstructionSpec& spec, std::size_t n, std::uint64_t cap, Visitor&& visit);

/// Per-level diameter statistics used by the M5 and filtration machinery.
struct LevelDiameterStats {
  double min_log_diameter = 0.0;
  double max_log_diameter = 0.0;
  /// min over words i of log diam(E_i) / log(min offspring ratio of i); the
  /// largest k with diam(E_i) <= (min offspring diam)^{1-1/k} for every
  /// level-n word is floor(this) + 1.
  double min_m5_quotient = 0.0;
  /// max over words with diam < 1 of |log diam(E_i)/log min_offspring_diam - 1|;
  /// NaN when some word at this level has diameter >= 1.
  double max_m5_deviation = 0.0;
};

/// Statistics for n = 0..depth. Closed form for word-independent specs;
/// otherwise enumerates every word, throwing InvalidArgument when the
/// total word count would exceed `enumeration_cap`.
std::vector<LevelDiameterStats> level_diameter_stats(const ConstructionSpec& spec, std::size_t depth,
                                                     std::uint64_t enumeration_cap = 1u << 22);

// -- implementation ----------------------------------------------------------

template <class Visitor>
void for_each_word(const ConstructionSpec& spec, std::size_t n, std::uint64_t cap, Visitor&& visit) {
  if (level_size(spec, n) > cap) {
    throw InvalidArgument("level too large to enumerate");
  }
  std::vector<std::uint32_t> branching(n);
  for (std::size_t k = 1; k <= n; ++k) branching[k - 1] = spec.branching(k);
  Word word(std::vector<Word::Index>(n, 1));
  while (true) {
    visit(static_cast<const Word&>(word));
    std::size_t pos = n;
    while (pos > 0) {
      const Word::Index current = word.at_level(pos);
      if (current < branching[pos - 1]) {
        word.set_at_level(pos, current + 1);
        break;
      }
      word.set_at_level(pos, 1);
      --pos;
    }
    if (pos == 0) return;
  }
}

}  // namespace moran
