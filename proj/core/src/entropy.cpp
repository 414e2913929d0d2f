#include "moran/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {
namespace {

/// log c_j for every offspring j of `parent`.
std::vector<double> offspring_log_ratios(const ConstructionSpec& spec, const Word& parent) {
  if (!spec.word_dependent()) return spec.log_ratios(parent.length() + 1);
  const Level level = spec.level(parent.length() + 1);
  std::vector<double> out(level.branching);
  Word child = parent;
  child.push_back(1);
  for (Word::Index i = 1; i <= level.branching; ++i) {
    child.set_at_level(child.length(), i);
    out[i - 1] = spec.realized_log_ratio(child);
  }
  return out;
}

double square_summand(std::span<const double> p, std::span<const double> log_c) {
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] == 0.0) continue;
    const double lp = std::log(p[j]);
    sum += p[j] * (lp * lp + log_c[j] * log_c[j]);
  }
  return sum;
}

}  // namespace

EntropyAverageTrace entropy_average_ratio(const MoranMeasure& measure, const Word& path_prefix, std::size_t N) {
  const auto& spec = measure.spec();
  if (N < 1) throw InvalidArgument("entropy_average_ratio: N must be at least 1");
  if (path_prefix.length() < N) {
    throw InvalidArgument(fmt::format("entropy_average_ratio: path of length {} shorter than N = {}",
                                      path_prefix.length(), N));
  }
  require_valid_word(spec, path_prefix);

  EntropyAverageTrace trace;
  trace.path = path_prefix.prefix(N);
  trace.depth = N;
  trace.numerator_partial.reserve(N);
  trace.denominator_partial.reserve(N);
  numeric::CompensatedSum numerator, denominator;
  Word parent;
  for (std::size_t k = 1; k <= N; ++k) {
    const auto p = measure.offspring_weights(parent, true);
    const auto log_c = offspring_log_ratios(spec, parent);
    double level_denominator = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] == 0.0) continue;
      numerator.add(p[j] * std::log(p[j]));
      level_denominator += p[j] * log_c[j];
    }
    denominator.add(level_denominator);
    trace.numerator_partial.push_back(numerator.value());
    trace.denominator_partial.push_back(denominator.value());
    const auto step = path_prefix.at_level(k);
    if (p[step - 1] == 0.0 && k < N) {
      throw InvalidArgument(fmt::format("entropy_average_ratio: path enters a zero-mass cylinder at level {}", k));
    }
    parent.push_back(step);
  }
  trace.numerator = numerator.value();
  trace.denominator = denominator.value();
  if (!(trace.denominator < 0.0)) throw InvalidArgument("entropy_average_ratio: zero denominator");
  trace.ratio = trace.numerator == 0.0 ? 0.0 : trace.numerator / trace.denominator;
  return trace;
}

const char* to_string(SeriesVerdict verdict) {
  return verdict == SeriesVerdict::plausibly_convergent ? "plausibly_convergent" : "diverging";
}

ConditionReport check_entropy_conditions(const MoranMeasure& measure, std::size_t n_max, std::size_t path_sample,
                                         std::uint64_t seed) {
  const auto& spec = measure.spec();
  if (n_max < 1) throw InvalidArgument("check_entropy_conditions: n_max must be at least 1");
  if (path_sample < 1) throw InvalidArgument("check_entropy_conditions: need at least one sampled path");

  ConditionReport report;
  PathSampler sampler(measure, seed);
  std::vector<Word> paths;
  paths.reserve(path_sample);
  for (std::size_t i = 0; i < path_sample; ++i) paths.push_back(sampler.sample(n_max + 1));

  const bool level_only = measure.level_indexed() && !spec.word_dependent();
  numeric::CompensatedSum partial;
  for (std::size_t n = 1; n <= n_max; ++n) {
    double sup = 0.0;
    if (level_only) {
      const auto p = measure.level_weights(n + 1);
      const auto log_c = offspring_log_ratios(spec, Word(std::vector<Word::Index>(n, 1)));
      sup = square_summand(p, log_c);
    } else if (level_size(spec, n) <= kSupEnumerationCap) {
      for_each_word(spec, n, kSupEnumerationCap, [&](const Word& w) {
        if (cylinder_log_mass(measure, w) == numeric::kNegInf) return;
        sup = std::max(sup, square_summand(measure.offspring_weights(w, true), offspring_log_ratios(spec, w)));
      });
    } else {
      report.sup_exact = false;
      for (const auto& path : paths) {
        const Word w = path.prefix(n);
        sup = std::max(sup, square_summand(measure.offspring_weights(w, true), offspring_log_ratios(spec, w)));
      }
    }
    const double term = sup / (static_cast<double>(n) * static_cast<double>(n));
    report.l2_summands.push_back(term);
    partial.add(term);
    report.l2_partial_sums.push_back(partial.value());
  }

  report.diamspeed_values.assign(n_max, std::numeric_limits<double>::infinity());
  for (const auto& path : paths) {
    double log_diam = spec.log_root_diameter();
    Word walk;
    for (std::size_t n = 1; n <= n_max; ++n) {
      walk.push_back(path.at_level(n));
      log_diam += spec.realized_log_ratio(walk);
      report.diamspeed_values[n - 1] =
          std::min(report.diamspeed_values[n - 1], -log_diam / static_cast<double>(n));
    }
  }
  report.diamspeed_liminf_estimate =
      numeric::tail_min_max(report.diamspeed_values, numeric::default_tail_window(n_max)).first;

  std::vector<double> xs, ys;
  for (std::size_t n = std::max<std::size_t>(1, n_max / 10); n <= n_max; ++n) {
    const double term = report.l2_summands[n - 1];
    if (term > 0.0) {
      xs.push_back(std::log(static_cast<double>(n)));
      ys.push_back(std::log(term));
    }
  }
  if (xs.size() >= 2) {
    report.decay_slope = numeric::least_squares(xs, ys).slope;
    report.verdict = report.decay_slope < kConvergentDecaySlope ? SeriesVerdict::plausibly_convergent
                                                                 : SeriesVerdict::diverging;
  } else {
    report.decay_slope = -std::numeric_limits<double>::infinity();
    report.verdict = SeriesVerdict::plausibly_convergent;
  }
  return report;
}

}  // namespace moran
