#include "moran/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/cylinder_classes.hpp"
#include "moran/dimension.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {
namespace {

// Words enumerated when build_filtration re-checks M1/M3 on a realization.
constexpr std::uint64_t kRealizationCheckCap = 1u << 16;
// Slack for the integer part of the M5 quotient (exact integers computed as
// n - 1e-16 must not lose a unit).
constexpr double kQuotientSlack = 1e-9;

/// Per-level statistics for an arbitrary diameter function by enumeration.
std::vector<LevelDiameterStats> enumerated_stats(const ConstructionSpec& spec,
                                                 const std::function<double(const Word&)>& log_diameter,
                                                 std::size_t depth) {
  std::vector<LevelDiameterStats> stats(depth + 1);
  std::vector<bool> seen(depth + 1, false);
  Word word;
  auto visit = [&](auto&& self, double log_diam) -> void {
    const std::size_t n = word.length();
    const auto branching = spec.branching(n + 1);
    std::vector<double> child_logs(branching);
    double m = 0.0;
    for (Word::Index i = 1; i <= branching; ++i) {
      word.push_back(i);
      child_logs[i - 1] = log_diameter(word);
      m = std::min(m, child_logs[i - 1] - log_diam);
      word.pop_back();
    }
    const double q = log_diam / m;
    auto& s = stats[n];
    if (!seen[n]) {
      s = {log_diam, log_diam, q, 0.0};
      seen[n] = true;
    } else {
      s.min_log_diameter = std::min(s.min_log_diameter, log_diam);
      s.max_log_diameter = std::max(s.max_log_diameter, log_diam);
      s.min_m5_quotient = std::min(s.min_m5_quotient, q);
    }
    if (n == depth) return;
    for (Word::Index i = 1; i <= branching; ++i) {
      word.push_back(i);
      self(self, child_logs[i - 1]);
      word.pop_back();
    }
  };
  visit(visit, log_diameter(Word{}));
  return stats;
}

/// Fills γ_n, k(n), N_k and δ_n from per-level statistics (index 0..depth).
void fill_scales(std::vector<double>& log_gamma, std::vector<double>& log_delta,
                 std::vector<std::size_t>& k_of_n, std::vector<std::size_t>& thresholds,
                 const std::vector<LevelDiameterStats>& stats, std::size_t depth, double c0) {
  // k_max(n): largest k with diam(E_i) <= (min offspring diam)^{1-1/k} for
  // every level-n word; suffix minima give the admissible k from level n on.
  std::vector<double> suffix_min(depth + 2, std::numeric_limits<double>::infinity());
  for (std::size_t n = depth; n >= 1; --n) {
    const double k_max = std::floor(stats[n].min_m5_quotient + kQuotientSlack) + 1.0;
    suffix_min[n] = std::min(suffix_min[n + 1], k_max);
  }
  log_gamma.resize(depth);
  log_delta.resize(depth);
  k_of_n.resize(depth);
  for (std::size_t n = 1; n <= depth; ++n) {
    const double k = std::max(2.0, suffix_min[n]);
    k_of_n[n - 1] = static_cast<std::size_t>(k);
    log_gamma[n - 1] = stats[n].min_log_diameter;
    log_delta[n - 1] = std::log(c0) + k / (k - 1.0) * log_gamma[n - 1];
  }
  thresholds.clear();
  for (std::size_t k = 2;; ++k) {
    std::size_t found = 0;
    for (std::size_t n = 1; n <= depth; ++n) {
      if (suffix_min[n] >= static_cast<double>(k)) {
        found = n;
        break;
      }
    }
    if (found == 0) break;
    thresholds.push_back(found);
  }
}

}  // namespace

double GeneralFiltration::log_diameter(const Word& word) const {
  if (log_diameter_) return log_diameter_(word);
  if (!spec_) throw InvalidArgument("filtration has no construction attached");
  return cylinder_log_diameter(*spec_, word);
}

double GeneralFiltration::log_threshold(std::size_t n) const {
  return log_gamma(n) + numeric::kLogTieTolerance;
}

bool GeneralFiltration::is_member(std::size_t n, const Word& word) const {
  if (n < 1 || n > depth()) throw InvalidArgument(fmt::format("level {} outside 1..{}", n, depth()));
  if (source_ == Source::hand_built) {
    const auto& level = explicit_levels_[n - 1];
    return std::find(level.begin(), level.end(), word) != level.end();
  }
  const double t = log_threshold(n);
  if (!(log_diameter(word) <= t)) return false;
  return word.is_root() || log_diameter(word.parent()) > t;
}

Word GeneralFiltration::member_containing(std::size_t n, const Word& path) const {
  if (n < 1 || n > depth()) throw InvalidArgument(fmt::format("level {} outside 1..{}", n, depth()));
  if (source_ == Source::hand_built) {
    for (const auto& w : explicit_levels_[n - 1]) {
      if (w.is_prefix_of(path)) return w;
    }
    throw InvalidArgument(fmt::format("no member of level {} contains {}", n, path.to_string()));
  }
  const double t = log_threshold(n);
  Word walk;
  double log_diam = log_diameter(walk);
  for (std::size_t j = 0;; ++j) {
    if (log_diam <= t) return walk;
    if (j == path.length()) break;
    walk.push_back(path.at_level(j + 1));
    log_diam = log_diameter_ ? log_diameter_(walk) : log_diam + spec_->realized_log_ratio(walk);
  }
  throw InvalidArgument(fmt::format("path {} too short to determine the level-{} member", path.to_string(), n));
}

std::vector<Word> GeneralFiltration::members(std::size_t n, std::uint64_t cap) const {
  if (n < 1 || n > depth()) throw InvalidArgument(fmt::format("level {} outside 1..{}", n, depth()));
  if (source_ == Source::hand_built) {
    auto out = explicit_levels_[n - 1];
    std::sort(out.begin(), out.end());
    return out;
  }
  const double t = log_threshold(n);
  std::vector<Word> out;
  Word word;
  auto visit = [&](auto&& self, double log_diam) -> void {
    if (log_diam <= t) {
      if (out.size() >= cap) throw InvalidArgument(fmt::format("level {} has more than {} members", n, cap));
      out.push_back(word);
      return;
    }
    const auto branching = spec_->branching(word.length() + 1);
    for (Word::Index i = 1; i <= branching; ++i) {
      word.push_back(i);
      self(self, log_diameter_ ? log_diameter_(word) : log_diam + spec_->realized_log_ratio(word));
      word.pop_back();
    }
  };
  visit(visit, log_diameter(word));
  return out;
}

double GeneralFiltration::log_member_count(std::size_t n) const {
  if (n < 1 || n > depth()) throw InvalidArgument(fmt::format("level {} outside 1..{}", n, depth()));
  if (source_ == Source::hand_built) return std::log(static_cast<double>(explicit_levels_[n - 1].size()));
  AntichainRefiner refiner(*spec_, nullptr, Word{}, log_diameter_);
  refiner.refine(log_threshold(n));
  return refiner.log_count();
}

GeneralFiltration build_symbolic_filtration(const ConstructionSpec& spec, std::size_t depth, double c0) {
  if (depth < 1) throw InvalidArgument("filtration depth must be at least 1");
  if (!(c0 > 0.0 && c0 < 1.0)) throw InvalidArgument("C0 must lie in (0, 1)");
  GeneralFiltration f;
  f.source_ = GeneralFiltration::Source::symbolic;
  f.c0_ = c0;
  f.spec_ = spec;
  const auto stats = level_diameter_stats(spec, depth);
  fill_scales(f.log_gamma_, f.log_delta_, f.k_, f.thresholds_, stats, depth, c0);
  return f;
}

GeneralFiltration build_filtration(const IntervalRealization& realization, std::size_t depth) {
  if (depth < 1) throw InvalidArgument("filtration depth must be at least 1");
  const bool explicit_map = !realization.rule_based();
  // Explicit maps need one level below `depth` for the offspring quotients.
  const std::size_t available = explicit_map ? (realization.depth() > 0 ? realization.depth() - 1 : 0)
                                             : realization.depth();
  if (depth > available) {
    throw InvalidArgument(fmt::format("filtration depth {} exceeds realized depth {}", depth, available));
  }
  const auto& spec = realization.spec();
  std::size_t check_depth = 0;
  std::uint64_t total = 1;
  while (check_depth < realization.depth()) {
    const auto next = level_size(spec, check_depth + 1);
    if (!explicit_map && total + next > kRealizationCheckCap) break;
    total += next;
    ++check_depth;
  }
  if (check_depth >= 1) {
    const auto axioms = verify_moran_axioms(realization, check_depth, 1);
    if (axioms.hard_failure()) {
      throw AxiomViolation("realization fails the Moran axioms: " +
                           (axioms.diagnostics.empty() ? std::string("M1/M3") : axioms.diagnostics.front()));
    }
  }

  GeneralFiltration f;
  f.source_ = GeneralFiltration::Source::realization;
  f.c0_ = std::min(realization.c0_certified(), 0.5);
  f.spec_ = spec;
  std::vector<LevelDiameterStats> stats;
  if (realization.rule_based()) {
    // Rule-based placements (the uniformly perfect example included) have
    // exactly the diameters of their spec.
    stats = level_diameter_stats(spec, depth);
  } else {
    f.log_diameter_ = [realization](const Word& w) { return realization.log_diameter(w); };
    stats = enumerated_stats(spec, f.log_diameter_, depth);
  }
  fill_scales(f.log_gamma_, f.log_delta_, f.k_, f.thresholds_, stats, depth, f.c0_);
  return f;
}

GeneralFiltration hand_built_filtration(std::vector<double> gamma, std::vector<double> delta,
                                        std::vector<std::vector<Word>> levels, double c0,
                                        std::optional<ConstructionSpec> spec) {
  if (gamma.empty() || gamma.size() != delta.size() || gamma.size() != levels.size()) {
    throw InvalidArgument("hand-built filtration: gamma, delta and levels need equal non-zero lengths");
  }
  GeneralFiltration f;
  f.source_ = GeneralFiltration::Source::hand_built;
  f.c0_ = c0;
  for (std::size_t n = 0; n < gamma.size(); ++n) {
    if (!(gamma[n] > 0.0) || !(delta[n] > 0.0)) throw InvalidArgument("hand-built filtration: scales must be positive");
    f.log_gamma_.push_back(std::log(gamma[n]));
    f.log_delta_.push_back(std::log(delta[n]));
    f.k_.push_back(0);
  }
  if (spec) {
    for (const auto& level : levels) {
      for (const auto& w : level) require_valid_word(*spec, w);
    }
  }
  f.explicit_levels_ = std::move(levels);
  f.spec_ = std::move(spec);
  return f;
}

namespace {

RatioTrend ratio_trend(std::vector<double> ratios, std::size_t first_n, std::size_t window) {
  RatioTrend out;
  out.ratios = std::move(ratios);
  std::vector<double> ns, devs;
  const std::size_t end = out.ratios.size();
  for (std::size_t i = end - window; i < end; ++i) {
    ns.push_back(static_cast<double>(first_n + i));
    devs.push_back(std::abs(out.ratios[i] - 1.0));
  }
  const auto trend = numeric::trend_toward_zero(ns, devs);
  out.final_deviation = trend.final_value;
  out.extrapolated_deviation = trend.extrapolated;
  out.decreasing = trend.decreasing;
  out.pass = trend.decreasing && std::abs(trend.extrapolated) < kTrendTolerance;
  return out;
}

}  // namespace

FiltrationAxiomReport verify_filtration_axioms(const GeneralFiltration& filtration, std::size_t trend_window) {
  const std::size_t depth = filtration.depth();
  if (trend_window < 2 || depth < 2 * trend_window) {
    throw InvalidArgument(fmt::format("verify_filtration_axioms: need depth ({}) >= 2 * trend_window ({}) >= 4",
                                      depth, trend_window));
  }
  FiltrationAxiomReport report;
  const auto& lg = filtration.log_gammas();
  const auto& ld = filtration.log_deltas();
  for (std::size_t n = 1; n <= depth; ++n) {
    if (ld[n - 1] > lg[n - 1]) {
      report.f1 = false;
      report.f1_first_violation = n;
      report.diagnostics.push_back(fmt::format("F1: delta_{} > gamma_{}", n, n));
      break;
    }
  }
  for (std::size_t n = 1; n < depth; ++n) {
    if (!(lg[n] < lg[n - 1]) || ld[n] > ld[n - 1]) {
      report.f2 = false;
      report.diagnostics.push_back(fmt::format("F2: scales do not decrease at level {}", n + 1));
      break;
    }
  }
  std::vector<double> f3, f4;
  for (std::size_t n = 1; n < depth; ++n) f3.push_back(ld[n - 1] / ld[n]);
  for (std::size_t n = 1; n <= depth; ++n) f4.push_back(lg[n - 1] / ld[n - 1]);
  report.f3 = ratio_trend(std::move(f3), 1, trend_window);
  report.f4 = ratio_trend(std::move(f4), 1, trend_window);
  if (!report.f3.pass) report.diagnostics.push_back("F3: log delta_n / log delta_{n+1} not trending to 1");
  if (!report.f4.pass) report.diagnostics.push_back("F4: log gamma_n / log delta_n not trending to 1");
  for (const auto& level : filtration.explicit_levels()) {
    if (!is_antichain(level)) {
      report.disjoint = false;
      report.diagnostics.push_back("members of a level are nested");
      break;
    }
  }
  return report;
}

LocalDimensionEstimate local_dim_via_filtration(const MoranMeasure& measure, const GeneralFiltration& filtration,
                                                const Word& path_prefix, std::size_t tail_window) {
  const std::size_t depth = filtration.depth();
  if (filtration.spec() && !same_construction(*filtration.spec(), measure.spec(), std::min<std::size_t>(depth, 64))) {
    throw InvalidArgument("local_dim_via_filtration: measure and filtration use different constructions");
  }
  require_valid_word(measure.spec(), path_prefix);
  const std::size_t window = tail_window == 0 ? numeric::default_tail_window(depth) : tail_window;
  if (window > depth) throw InvalidArgument("tail window exceeds the filtration depth");

  // Cumulative log masses and member lengths along the path.
  std::vector<double> log_mass{std::log(measure.root_mass())};
  std::vector<bool> proper_weight{false};
  Word walk;
  LocalDimensionEstimate out;
  out.tail_window = window;
  std::vector<std::size_t> member_length(depth);
  for (std::size_t n = 1; n <= depth; ++n) {
    const Word q = filtration.member_containing(n, path_prefix);
    member_length[n - 1] = q.length();
    while (walk.length() < q.length()) {
      const auto p = measure.offspring_weights(walk, true);
      const auto step = path_prefix.at_level(walk.length() + 1);
      const double w = p[step - 1];
      if (w == 0.0) throw InvalidArgument("local_dim_via_filtration: path runs through a zero-mass cylinder");
      log_mass.push_back(log_mass.back() + std::log(w));
      proper_weight.push_back(w < 1.0);
      walk.push_back(step);
    }
    out.ratios.push_back(log_mass[q.length()] / filtration.log_delta(n));
  }
  const std::size_t tail_start = member_length[depth - window];
  const std::size_t tail_end = member_length[depth - 1];
  bool split = false;
  for (std::size_t j = tail_start + 1; j <= tail_end; ++j) split = split || proper_weight[j];
  if (!split) throw InvalidArgument("local_dim_via_filtration: the measure has an atom along this path");
  std::tie(out.lower, out.upper) = numeric::tail_min_max(out.ratios, window);
  return out;
}

std::string filtration_summary_csv(const GeneralFiltration& filtration) {
  std::string out = "n,gamma_n,delta_n,level_size,F3_ratio,F4_ratio\n";
  const std::size_t depth = filtration.depth();
  std::optional<AntichainRefiner> refiner;
  if (filtration.source() != GeneralFiltration::Source::hand_built) {
    refiner.emplace(*filtration.spec(), nullptr, Word{}, filtration.diameter_override());
  }
  for (std::size_t n = 1; n <= depth; ++n) {
    double log_count;
    if (refiner) {
      refiner->refine(filtration.log_threshold(n));
      log_count = refiner->log_count();
    } else {
      log_count = filtration.log_member_count(n);
    }
    const std::string f3 =
        n < depth ? fmt::format("{}", filtration.log_delta(n) / filtration.log_delta(n + 1)) : std::string();
    out += fmt::format("{},{},{},{},{},{}\n", n, numeric::format_from_log(filtration.log_gamma(n)),
                       numeric::format_from_log(filtration.log_delta(n)), numeric::format_from_log(log_count), f3,
                       filtration.log_gamma(n) / filtration.log_delta(n));
  }
  return out;
}

}  // namespace moran
