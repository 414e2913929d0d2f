#include "moran/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {

LevelEquation::LevelEquation(const ConstructionSpec& spec) : spec_(&spec) {}

void LevelEquation::extend_to(std::size_t n) {
  for (; levels_ < n; ++levels_) {
    auto logs = spec_->log_ratios(levels_ + 1);
    auto it = std::find_if(terms_.begin(), terms_.end(),
                           [&](const Term& t) { return t.log_ratios == logs; });
    if (it == terms_.end()) {
      Term t;
      t.equal_ratios = std::all_of(logs.begin(), logs.end(), [&](double v) { return v == logs.front(); });
      t.log_ratios = std::move(logs);
      terms_.push_back(std::move(t));
      it = std::prev(terms_.end());
    }
    it->multiplicity += 1.0;
  }
}

double LevelEquation::operator()(double s) const {
  numeric::CompensatedSum acc;
  for (const auto& t : terms_) {
    double g;
    if (t.equal_ratios) {
      g = std::log(static_cast<double>(t.log_ratios.size())) + s * t.log_ratios.front();
    } else {
      const double top = s * *std::max_element(t.log_ratios.begin(), t.log_ratios.end());
      double inner = 0.0;
      for (double lc : t.log_ratios) inner += std::exp(s * lc - top);
      g = top + std::log(inner);
    }
    acc.add(t.multiplicity * g);
  }
  return acc.value();
}

double LevelEquation::log_count() const {
  numeric::CompensatedSum acc;
  for (const auto& t : terms_) acc.add(t.multiplicity * std::log(static_cast<double>(t.log_ratios.size())));
  return acc.value();
}

double solve_decreasing_root(const std::function<double(double)>& f, double tolerance) {
  double lo = 0.0;
  double f_lo = f(lo);
  if (f_lo <= tolerance) {
    if (f_lo < -tolerance) throw InvalidArgument("solve_decreasing_root: f(0) < 0");
    return 0.0;
  }
  double hi = 1.0;
  double f_hi = f(hi);
  while (f_hi > 0.0) {
    lo = hi;
    f_lo = f_hi;
    hi *= 2.0;
    if (hi > 0x1.0p60) throw NonConvergence("solve_decreasing_root: bracket growth did not terminate");
    f_hi = f(hi);
  }
  for (int step = 0; step < kMaxBisectionSteps; ++step) {
    if (std::abs(f_hi) <= tolerance) return hi;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = f(mid);
    if (std::abs(f_mid) <= tolerance) return mid;
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  const double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  const double residual = std::min(std::abs(f_lo), std::abs(f_hi));
  if (residual > 1e-10) {
    throw NonConvergence(fmt::format("bisection stalled with residual {:.3e}", residual));
  }
  return best;
}

double solve_level_dimension(const ConstructionSpec& spec, std::size_t n, double tolerance) {
  if (n < 1) throw InvalidArgument("solve_level_dimension: level must be at least 1");
  LevelEquation equation(spec);
  equation.extend_to(n);
  if (equation.log_count() == 0.0) return 0.0;
  return solve_decreasing_root([&](double s) { return equation(s); }, tolerance);
}

double solve_realized_level_dimension(const ConstructionSpec& spec, std::size_t n,
                                      std::uint64_t enumeration_cap, double tolerance) {
  if (n < 1) throw InvalidArgument("solve_realized_level_dimension: level must be at least 1");
  std::vector<double> log_products;
  for_each_word(spec, n, enumeration_cap, [&](const Word& w) {
    log_products.push_back(cylinder_log_diameter(spec, w) - spec.log_root_diameter());
  });
  if (log_products.size() == 1) return 0.0;
  std::vector<double> scaled(log_products.size());
  return solve_decreasing_root(
      [&](double s) {
        for (std::size_t i = 0; i < log_products.size(); ++i) scaled[i] = s * log_products[i];
        return numeric::log_sum_exp(scaled);
      },
      tolerance);
}

DimensionReport dimension_report(const ConstructionSpec& spec, std::size_t n_max, std::size_t tail_window,
                                 double tolerance) {
  if (tail_window < 1 || n_max < tail_window) {
    throw InvalidArgument(fmt::format("dimension_report: need n_max ({}) >= tail_window ({}) >= 1", n_max,
                                      tail_window));
  }
  DimensionReport report;
  report.tail_window = tail_window;
  report.solver_tolerance = tolerance;
  report.s_sequence.reserve(n_max);
  report.residuals.reserve(n_max);
  LevelEquation equation(spec);
  for (std::size_t n = 1; n <= n_max; ++n) {
    equation.extend_to(n);
    double s = 0.0;
    if (equation.log_count() != 0.0) {
      s = solve_decreasing_root([&](double x) { return equation(x); }, tolerance);
    }
    report.s_sequence.push_back(s);
    report.residuals.push_back(equation(s));
  }
  const auto [lo, hi] = numeric::tail_min_max(report.s_sequence, tail_window);
  report.s_star = lo;
  report.s_upper_star = hi;
  report.oscillation_last = hi - lo;
  if (n_max >= 2 * tail_window) {
    const std::span<const double> seq(report.s_sequence);
    const auto [plo, phi] = numeric::tail_min_max(seq.first(n_max - tail_window), tail_window);
    report.oscillation_previous = phi - plo;
  } else {
    report.oscillation_previous = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

HomogeneousDimension homogeneous_dimension(const ConstructionSpec& spec, std::size_t n_max,
                                           std::size_t tail_window) {
  if (spec.kind() != ConstructionKind::homogeneous) {
    throw InvalidArgument("homogeneous_dimension requires a homogeneous spec");
  }
  if (tail_window < 1 || n_max < tail_window) {
    throw InvalidArgument("homogeneous_dimension: need n_max >= tail_window >= 1");
  }
  HomogeneousDimension out;
  numeric::CompensatedSum log_count, log_contraction;
  for (std::size_t k = 1; k <= n_max; ++k) {
    const Level level = spec.level(k);
    log_count.add(std::log(static_cast<double>(level.branching)));
    log_contraction.add(-spec.log_ratios(k).front());
    out.ratios.push_back(log_count.value() / log_contraction.value());
  }
  std::tie(out.liminf_estimate, out.limsup_estimate) = numeric::tail_min_max(out.ratios, tail_window);
  return out;
}

bool is_antichain(std::span<const Word> words) {
  std::vector<Word> sorted(words.begin(), words.end());
  std::sort(sorted.begin(), sorted.end());
  // In lexicographic order a word's extensions follow it immediately.
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i - 1].is_prefix_of(sorted[i])) return false;
  }
  return true;
}

bool is_symbolic_cover(const ConstructionSpec& spec, std::span<const Word> cover) {
  if (cover.empty()) return false;
  std::size_t deepest = 0;
  for (const auto& w : cover) deepest = std::max(deepest, w.length());
  const std::set<Word> members(cover.begin(), cover.end());
  Word word;
  auto covered = [&](auto&& self) -> bool {
    if (members.count(word)) return true;
    if (word.length() == deepest) return false;
    const auto n = spec.branching(word.length() + 1);
    for (Word::Index i = 1; i <= n; ++i) {
      word.push_back(i);
      const bool ok = self(self);
      word.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return covered(covered);
}

CoverWitness cover_comparison_witness(const ConstructionSpec& spec, std::span<const Word> cover, double s,
                                      CoverClaim claim) {
  if (!(s > 0.0)) throw InvalidArgument("cover_comparison_witness: s must be positive");
  for (const auto& w : cover) require_valid_word(spec, w);
  if (!is_symbolic_cover(spec, cover)) throw InvalidArgument("cover_comparison_witness: input is not a cover");
  if (claim == CoverClaim::packing && !is_antichain(cover)) {
    throw InvalidArgument("cover_comparison_witness: packing claim needs pairwise disjoint cylinders");
  }

  CoverWitness out;
  out.min_level = std::numeric_limits<std::size_t>::max();
  std::vector<double> terms;
  for (const auto& w : cover) {
    out.min_level = std::min(out.min_level, w.length());
    out.max_level = std::max(out.max_level, w.length());
    terms.push_back(s * log_ratio_product(spec, w));
  }
  out.cover_log_sum = numeric::log_sum_exp(terms);

  LevelEquation equation(spec);
  for (std::size_t k = out.min_level; k <= out.max_level; ++k) {
    equation.extend_to(k);
    out.level_log_sums.push_back(equation(s));
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(out.cover_log_sum));
  for (std::size_t j = 0; j < out.level_log_sums.size(); ++j) {
    const double level_sum = out.level_log_sums[j];
    const bool holds = claim == CoverClaim::covering ? level_sum <= out.cover_log_sum + slack
                                                     : level_sum >= out.cover_log_sum - slack;
    if (holds) {
      out.level = out.min_level + j;
      return out;
    }
  }
  throw AxiomViolation(fmt::format("no witness level in [{}, {}] for the {} comparison at s = {}",
                                   out.min_level, out.max_level,
                                   claim == CoverClaim::covering ? "covering" : "packing", s));
}

}  // namespace moran
