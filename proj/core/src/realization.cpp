#include "moran/realization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {
namespace {

double example_ratio(double eta) { return eta * eta / 3.0; }

/// Largest ratio sum a level can reach once the perturbation is applied.
double worst_ratio_sum(const ConstructionSpec& spec, const Level& level) {
  double sum = 0.0;
  for (double c : level.ratios) sum += c;
  if (spec.perturbation()) sum *= std::exp(spec.perturbation()->amplitude);
  return sum;
}

std::size_t exact_depth_for(const ConstructionSpec& spec, std::size_t depth) {
  std::uint64_t total = 0;
  std::size_t d = 0;
  for (std::size_t n = 0; n <= depth; ++n) {
    const auto size = level_size(spec, n);
    if (size > kAxiomEnumerationCap || total + size > kAxiomEnumerationCap) break;
    total += size;
    d = n;
  }
  return d;
}

}  // namespace

std::string to_string(GapRule rule) {
  switch (rule) {
    case GapRule::uniform_gaps: return "uniform_gaps";
    case GapRule::left_packed: return "left_packed";
    case GapRule::edge_anchored: return "edge_anchored";
    case GapRule::uniformly_perfect: return "uniformly_perfect";
    case GapRule::explicit_map: return "explicit";
  }
  return "unknown";
}

GapRule gap_rule_from_string(const std::string& text) {
  for (auto rule : {GapRule::uniform_gaps, GapRule::left_packed, GapRule::edge_anchored,
                    GapRule::uniformly_perfect, GapRule::explicit_map}) {
    if (to_string(rule) == text) return rule;
  }
  throw InvalidArgument("unknown gap rule '" + text + "'");
}

IntervalRealization::IntervalRealization(ConstructionSpec spec, GapRule rule, std::size_t depth, double eta)
    : spec_(std::move(spec)), rule_(rule), depth_(depth), eta_(eta) {}

IntervalRealization::IntervalRealization(ConstructionSpec spec, GapRule rule, std::size_t depth)
    : spec_(std::move(spec)), rule_(rule), depth_(depth) {
  if (rule == GapRule::explicit_map || rule == GapRule::uniformly_perfect) {
    throw InvalidArgument("use from_intervals / uniformly_perfect_example for this gap rule");
  }
  for (std::size_t k = 1; k <= depth_; ++k) {
    const Level level = spec_.level(k);
    const double sum = worst_ratio_sum(spec_, level);
    if (rule == GapRule::uniform_gaps && !(sum < 1.0)) {
      throw InvalidArgument(fmt::format(
          "level {}: ratios sum to {} >= 1, no room for positive gaps under uniform_gaps", k, sum));
    }
    if (sum > 1.0) {
      throw InvalidArgument(fmt::format("level {}: ratios sum to {} > 1, children cannot be disjoint", k, sum));
    }
    if (level.branching >= 2 && (rule == GapRule::left_packed || sum == 1.0)) touching_ = true;
  }
}

IntervalRealization IntervalRealization::from_intervals(ConstructionSpec spec,
                                                        std::map<Word, std::pair<Coordinate, Coordinate>> intervals) {
  IntervalRealization out(std::move(spec), GapRule::explicit_map, 0, 0.0);
  std::size_t longest = 0;
  for (const auto& [word, ends] : intervals) {
    require_valid_word(out.spec_, word);
    if (!(ends.second >= ends.first)) {
      throw InvalidArgument(fmt::format("interval for {} has right < left", word.to_string()));
    }
    out.explicit_[word] = Interval{ends.first, ends.second, static_cast<double>(ends.second - ends.first)};
    longest = std::max(longest, word.length());
  }
  if (!out.explicit_.count(Word{})) throw InvalidArgument("explicit realization needs the root interval");
  std::size_t depth = 0;
  while (depth < longest) {
    bool complete = true;
    for_each_word(out.spec_, depth + 1, kAxiomEnumerationCap, [&](const Word& w) {
      complete = complete && out.explicit_.count(w) > 0;
    });
    if (!complete) break;
    ++depth;
  }
  out.depth_ = depth;
  double c0 = 0.5;
  for (const auto& [word, iv] : out.explicit_) {
    if (iv.length <= 0.0) c0 = 0.0;
  }
  out.c0_ = c0;
  return out;
}

std::vector<Interval> IntervalRealization::children(const Word& word, const Interval& parent) const {
  const std::size_t k = word.length() + 1;
  const std::size_t n = spec_.branching(k);
  std::vector<Interval> out(n);
  if (rule_ == GapRule::explicit_map) {
    for (Word::Index i = 1; i <= n; ++i) {
      auto it = explicit_.find(word.child(i));
      if (it == explicit_.end()) {
        throw InvalidArgument(fmt::format("no interval for {}", word.child(i).to_string()));
      }
      out[i - 1] = it->second;
    }
    return out;
  }
  if (rule_ == GapRule::uniformly_perfect) {
    const double c = example_ratio(eta_);
    const Coordinate center = (parent.left + parent.right) / 2;
    const Coordinate parent_radius = static_cast<Coordinate>(parent.length) / 2;
    const double length = std::pow(c, static_cast<double>(k));
    const Coordinate radius = static_cast<Coordinate>(length) / 2;
    const Coordinate offset = static_cast<Coordinate>((1.0 + eta_ / 3.0) / 2.0) * parent_radius;
    out[0] = Interval{center - radius, center + radius, length};
    out[1] = Interval{center + offset - radius, center + offset + radius, length};
    return out;
  }

  const Level level = spec_.level(k);
  std::vector<double> lengths(n);
  Coordinate used = 0;
  Word child = word;
  child.push_back(1);
  for (std::size_t i = 0; i < n; ++i) {
    lengths[i] = parent.length * level.ratios[i];
    if (spec_.word_dependent()) {
      child.set_at_level(k, static_cast<Word::Index>(i + 1));
      lengths[i] *= std::exp(spec_.log_jitter(child));
    }
    used += static_cast<Coordinate>(lengths[i]);
  }
  const Coordinate slack = parent.right - parent.left - used;
  Coordinate gap = 0;
  Coordinate cursor = parent.left;
  switch (rule_) {
    case GapRule::uniform_gaps:
      gap = slack / static_cast<Coordinate>(n + 1);
      cursor += gap;
      break;
    case GapRule::edge_anchored:
      gap = n >= 2 ? slack / static_cast<Coordinate>(n - 1) : 0;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Coordinate left = cursor;
    const Coordinate right = left + static_cast<Coordinate>(lengths[i]);
    out[i] = Interval{left, right, lengths[i]};
    cursor = right + gap;
  }
  if (rule_ == GapRule::edge_anchored && n >= 2) {
    out[n - 1].right = parent.right;
    out[n - 1].left = parent.right - static_cast<Coordinate>(lengths[n - 1]);
  }
  return out;
}

Interval IntervalRealization::interval(const Word& word) const {
  require_valid_word(spec_, word);
  if (word.length() > depth_) {
    throw InvalidArgument(fmt::format("word {} is beyond the realized depth {}", word.to_string(), depth_));
  }
  if (rule_ == GapRule::explicit_map) {
    auto it = explicit_.find(word);
    if (it == explicit_.end()) throw InvalidArgument(fmt::format("no interval for {}", word.to_string()));
    return it->second;
  }
  const double root = rule_ == GapRule::uniformly_perfect ? 2.0 : spec_.root_diameter();
  Interval current{0, static_cast<Coordinate>(root), root};
  Word walk;
  for (auto i : word.indices()) {
    current = children(walk, current)[i - 1];
    walk.push_back(i);
  }
  return current;
}

double IntervalRealization::log_diameter(const Word& word) const {
  if (rule_ == GapRule::explicit_map) return std::log(interval(word).length);
  require_valid_word(spec_, word);
  if (rule_ == GapRule::uniformly_perfect) {
    return word.is_root() ? std::log(2.0) : static_cast<double>(word.length()) * std::log(example_ratio(eta_));
  }
  return cylinder_log_diameter(spec_, word);
}

IntervalRealization realize_on_interval(const ConstructionSpec& spec, GapRule rule, std::size_t depth) {
  return IntervalRealization(spec, rule, depth);
}

ConstructionSpec uniformly_perfect_spec(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0, 1)");
  const double c = example_ratio(eta);
  return ConstructionSpec({uniform_level(2, c / 2.0)}, PeriodicTail{{uniform_level(2, c)}},
                          ConstructionKind::homogeneous, 2.0);
}

ConstructionSpec uniformly_perfect_reference_spec(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw InvalidArgument("eta must lie in (0, 1)");
  const double c = example_ratio(eta);
  return constant_spec({c, c});
}

IntervalRealization uniformly_perfect_example(double eta, std::size_t depth) {
  return IntervalRealization(uniformly_perfect_spec(eta), GapRule::uniformly_perfect, depth, eta);
}

double asymptotic_symmetry_ratio(const IntervalRealization& realization, const ConstructionSpec& reference,
                                 const Word& path) {
  if (path.is_root()) throw InvalidArgument("asymptotic_symmetry_ratio: empty path");
  const double realized = realization.log_diameter(path) - realization.log_diameter(Word{});
  return realized / log_ratio_product(reference, path);
}

PointEstimate point_of(const IntervalRealization& realization, const Word& prefix) {
  if (prefix.is_root()) throw InvalidArgument("point_of: prefix must have length at least 1");
  const Interval iv = realization.interval(prefix);
  return {iv.midpoint(), static_cast<double>((iv.right - iv.left) / 2)};
}

MoranAxiomReport verify_moran_axioms(const IntervalRealization& realization, std::size_t depth,
                                     std::size_t m5_window) {
  if (depth > realization.depth()) {
    throw InvalidArgument(fmt::format("verify depth {} exceeds realized depth {}", depth, realization.depth()));
  }
  if (m5_window < 1 || m5_window > depth) throw InvalidArgument("m5_window must lie in [1, depth]");
  const auto& spec = realization.spec();
  MoranAxiomReport report;
  report.depth = depth;
  report.exact_depth = exact_depth_for(spec, depth);
  report.c0_certified = 0.5;

  const bool closed_form = realization.rule_based() && !spec.word_dependent();
  const std::size_t stats_depth = closed_form ? depth : report.exact_depth;
  std::vector<double> max_log(stats_depth + 1, numeric::kNegInf);
  std::vector<double> deviation(stats_depth + 1, 0.0);
  if (closed_form) {
    const auto stats = level_diameter_stats(spec, depth);
    for (std::size_t n = 0; n <= depth; ++n) {
      max_log[n] = stats[n].max_log_diameter;
      deviation[n] = stats[n].max_m5_deviation;
    }
  }

  Word word;
  auto visit = [&](auto&& self, const Interval& iv, double log_diam) -> void {
    const std::size_t n = word.length();
    const Coordinate span = iv.right - iv.left;
    if (!(span > 0)) {
      report.m4 = false;
      report.c0_certified = 0.0;
    } else {
      report.c0_certified = std::min(report.c0_certified, static_cast<double>(span / 2) / iv.length);
      report.max_length_error =
          std::max(report.max_length_error, std::abs(static_cast<double>(span) / iv.length - 1.0));
    }
    if (n == report.exact_depth) {
      if (!closed_form) max_log[n] = std::max(max_log[n], log_diam);
      return;
    }
    const auto kids = realization.children(word, iv);
    double min_child = 0.0;
    std::vector<std::pair<Coordinate, Coordinate>> spans;
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      min_child = std::min(min_child, std::log(kids[i].length) - log_diam);
      if (report.m1 && (kids[i].left < iv.left || kids[i].right > iv.right)) {
        report.m1 = false;
        report.diagnostics.push_back(fmt::format("M1: {} not nested in its parent", word.to_string()));
      }
      word.pop_back();
      spans.emplace_back(kids[i].left, kids[i].right);
    }
    std::vector<std::size_t> order(kids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return spans[a].first < spans[b].first; });
    for (std::size_t j = 1; j < order.size(); ++j) {
      if (report.m3 && !(spans[order[j - 1]].second < spans[order[j]].first)) {
        report.m3 = false;
        report.diagnostics.push_back(fmt::format("M3: offsprings {} and {} of {} intersect", order[j - 1] + 1,
                                                 order[j] + 1, word.to_string()));
      }
    }
    if (!closed_form) {
      max_log[n] = std::max(max_log[n], log_diam);
      const double dev = log_diam < 0.0 ? min_child / (log_diam + min_child)
                                         : std::numeric_limits<double>::quiet_NaN();
      deviation[n] = (std::isnan(dev) || std::isnan(deviation[n])) ? std::numeric_limits<double>::quiet_NaN()
                                                                    : std::max(deviation[n], dev);
    }
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      self(self, kids[i], std::log(kids[i].length));
      word.pop_back();
    }
  };
  const Interval root = realization.interval(Word{});
  visit(visit, root, std::log(root.length));

  if (report.max_length_error > 1e-12 && realization.rule_based()) {
    report.diagnostics.push_back(fmt::format("interval lengths deviate from nominal diameters by {:.3e}",
                                             report.max_length_error));
  }
  if (!(report.c0_certified > 0.0)) report.m4 = false;

  report.max_log_diameters = max_log;
  report.m5_deviations = deviation;
  // The deepest explicitly enumerated level has no M5 value (its offsprings
  // were not visited).
  const std::size_t last = closed_form ? depth : (stats_depth > 0 ? stats_depth - 1 : 0);
  const std::size_t window = std::min(m5_window, last);
  if (window < 1) {
    report.m2 = report.m5 = false;
    report.diagnostics.push_back("M2/M5: not enough levels to judge a trend");
    return report;
  }
  std::vector<double> ns, devs;
  for (std::size_t n = last + 1 - window; n <= last; ++n) {
    ns.push_back(static_cast<double>(n));
    devs.push_back(deviation[n]);
    if (max_log[n] > max_log[n - 1]) report.m2 = false;
  }
  if (!(max_log[last] < max_log[last - window])) report.m2 = false;
  if (!report.m2) report.diagnostics.push_back("M2: maximal diameter does not decrease over the window");
  if (std::any_of(devs.begin(), devs.end(), [](double d) { return std::isnan(d); })) {
    report.m5 = false;
    report.m5_final_deviation = report.m5_extrapolated_deviation = std::numeric_limits<double>::quiet_NaN();
    report.diagnostics.push_back("M5: diameters >= 1 inside the window");
    return report;
  }
  const auto trend = numeric::trend_toward_zero(ns, devs);
  report.m5_final_deviation = trend.final_value;
  report.m5_extrapolated_deviation = trend.extrapolated;
  report.m5 = trend.decreasing && std::abs(trend.extrapolated) < kTrendTolerance;
  if (!report.m5) {
    report.diagnostics.push_back(fmt::format("M5: deviation {:.3e} (extrapolated {:.3e}) not trending to 0",
                                             trend.final_value, trend.extrapolated));
  }
  return report;
}

bool same_construction(const ConstructionSpec& a, const ConstructionSpec& b, std::size_t depth) {
  if (a.root_diameter() != b.root_diameter() || a.perturbation() != b.perturbation()) return false;
  for (std::size_t k = 1; k <= depth; ++k) {
    if (!(a.level(k) == b.level(k))) return false;
  }
  return true;
}

std::vector<double> sample_points(const IntervalRealization& realization, const MoranMeasure& measure,
                                  std::size_t count, std::uint64_t seed) {
  if (count < 1) throw InvalidArgument("sample_points: count must be at least 1");
  if (!same_construction(realization.spec(), measure.spec(), realization.depth())) {
    throw InvalidArgument("sample_points: measure and realization use different constructions");
  }
  PathSampler sampler(measure, seed);
  std::vector<double> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    points.push_back(realization.interval(sampler.sample(realization.depth())).midpoint());
  }
  return points;
}

std::string realization_csv(const IntervalRealization& realization, std::size_t depth) {
  if (depth > realization.depth()) throw InvalidArgument("realization_csv: depth exceeds realized depth");
  std::string out = "word,left,right\n";
  Word word;
  auto visit = [&](auto&& self, const Interval& iv) -> void {
    out += fmt::format("{},{:.17g},{:.17g}\n", word.to_string(), static_cast<double>(iv.left),
                       static_cast<double>(iv.right));
    if (word.length() == depth) return;
    const auto kids = realization.children(word, iv);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      self(self, kids[i]);
      word.pop_back();
    }
  };
  if (log_level_size(realization.spec(), depth) > std::log(static_cast<double>(kAxiomEnumerationCap))) {
    throw InvalidArgument("realization_csv: too many words");
  }
  visit(visit, realization.interval(Word{}));
  return out;
}

}  // namespace moran
