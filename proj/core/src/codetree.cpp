#include "moran/codetree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {

bool is_valid_word(const ConstructionSpec& spec, const Word& word) {
  for (std::size_t k = 1; k <= word.length(); ++k) {
    const auto i = word.at_level(k);
    if (i < 1 || i > spec.branching(k)) return false;
  }
  return true;
}

void require_valid_word(const ConstructionSpec& spec, const Word& word) {
  for (std::size_t k = 1; k <= word.length(); ++k) {
    const auto i = word.at_level(k);
    const auto n = spec.branching(k);
    if (i < 1 || i > n) {
      throw InvalidArgument(fmt::format("word {}: index {} at level {} outside 1..{}",
                                        word.to_string(), i, k, n));
    }
  }
}

std::vector<Word> offsprings(const ConstructionSpec& spec, const Word& word) {
  require_valid_word(spec, word);
  const auto n = spec.branching(word.length() + 1);
  std::vector<Word> out;
  out.reserve(n);
  for (Word::Index i = 1; i <= n; ++i) out.push_back(word.child(i));
  return out;
}

double cylinder_log_diameter(const ConstructionSpec& spec, const Word& word) {
  require_valid_word(spec, word);
  numeric::CompensatedSum acc;
  acc.add(spec.log_root_diameter());
  Word walk;
  for (auto i : word.indices()) {
    walk.push_back(i);
    acc.add(spec.realized_log_ratio(walk));
  }
  return acc.value();
}

double log_ratio_product(const ConstructionSpec& spec, const Word& word) {
  require_valid_word(spec, word);
  numeric::CompensatedSum acc;
  for (std::size_t k = 1; k <= word.length(); ++k) acc.add(spec.log_ratios(k)[word.at_level(k) - 1]);
  return acc.value();
}

double symmetric_log_diameter(const ConstructionSpec& spec, const Word& word) {
  return spec.log_root_diameter() + log_ratio_product(spec, word);
}

double rho_distance(const ConstructionSpec& spec, const Word& a, const Word& b) {
  require_valid_word(spec, a);
  require_valid_word(spec, b);
  const std::size_t n = common_prefix_length(a, b);
  if (n == std::min(a.length(), b.length())) return 0.0;
  if (n == 0) return 1.0;
  return std::exp(log_ratio_product(spec, a.prefix(n)));
}

double log_level_size(const ConstructionSpec& spec, std::size_t n) {
  numeric::CompensatedSum acc;
  for (std::size_t k = 1; k <= n; ++k) acc.add(std::log(static_cast<double>(spec.branching(k))));
  return acc.value();
}

std::uint64_t level_size(const ConstructionSpec& spec, std::size_t n) {
  std::uint64_t size = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    const std::uint64_t b = spec.branching(k);
    if (size > std::numeric_limits<std::uint64_t>::max() / b) return std::numeric_limits<std::uint64_t>::max();
    size *= b;
  }
  return size;
}

namespace {

double min_of(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }
double max_of(const std::vector<double>& v) { return *std::max_element(v.begin(), v.end()); }

void fold_word(LevelDiameterStats& s, bool first, double log_diam, double min_child_log_ratio) {
  const double q = log_diam / min_child_log_ratio;
  const double dev = log_diam < 0.0 ? min_child_log_ratio / (log_diam + min_child_log_ratio)
                                    : std::numeric_limits<double>::quiet_NaN();
  if (first) {
    s = {log_diam, log_diam, q, dev};
    return;
  }
  s.min_log_diameter = std::min(s.min_log_diameter, log_diam);
  s.max_log_diameter = std::max(s.max_log_diameter, log_diam);
  s.min_m5_quotient = std::min(s.min_m5_quotient, q);
  s.max_m5_deviation = (std::isnan(dev) || std::isnan(s.max_m5_deviation))
                           ? std::numeric_limits<double>::quiet_NaN()
                           : std::max(s.max_m5_deviation, dev);
}

}  // namespace

std::vector<LevelDiameterStats> level_diameter_stats(const ConstructionSpec& spec, std::size_t depth,
                                                     std::uint64_t enumeration_cap) {
  std::vector<LevelDiameterStats> stats(depth + 1);
  if (!spec.word_dependent()) {
    numeric::CompensatedSum lo, hi;
    lo.add(spec.log_root_diameter());
    hi.add(spec.log_root_diameter());
    for (std::size_t n = 0; n <= depth; ++n) {
      const auto next = spec.log_ratios(n + 1);
      const double m = min_of(next);
      // Diameters of level-n words span [lo, hi]; the M5 quantities are
      // extremal at the largest diameter.
      fold_word(stats[n], true, hi.value(), m);
      stats[n].min_log_diameter = lo.value();
      lo.add(m);
      hi.add(max_of(next));
    }
    return stats;
  }

  std::uint64_t total = 0;
  for (std::size_t n = 0; n <= depth; ++n) {
    total += level_size(spec, n);
    if (total > enumeration_cap) {
      throw InvalidArgument(
          fmt::format("word-dependent spec: {} levels exceed the enumeration cap {}", depth, enumeration_cap));
    }
  }
  std::vector<bool> seen(depth + 1, false);
  Word word;
  auto visit = [&](auto&& self, double log_diam) -> void {
    const std::size_t n = word.length();
    const auto branching = spec.branching(n + 1);
    double m = 0.0;
    for (Word::Index i = 1; i <= branching; ++i) {
      word.push_back(i);
      m = std::min(m, spec.realized_log_ratio(word));
      word.pop_back();
    }
    fold_word(stats[n], !seen[n], log_diam, m);
    seen[n] = true;
    if (n == depth) return;
    for (Word::Index i = 1; i <= branching; ++i) {
      word.push_back(i);
      self(self, log_diam + spec.realized_log_ratio(word));
      word.pop_back();
    }
  };
  visit(visit, spec.log_root_diameter());
  return stats;
}

}  // namespace moran
