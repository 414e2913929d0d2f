#include "moran/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {
namespace {

constexpr std::uint64_t kLeafCap = 1u << 22;

// Radii arrive as doubles while endpoints are quad precision; a cylinder that
// touches the ball boundary in exact arithmetic must not be split by the
// rounding of r.
Coordinate boundary_slack(double x, double r) { return static_cast<Coordinate>(1e-15 * (std::abs(x) + r)); }

/// Calls visit(word, interval) for every word of length `depth`.
template <class Visit>
void for_each_leaf(const IntervalRealization& realization, std::size_t depth, Visit&& visit) {
  if (depth > realization.depth()) {
    throw InvalidArgument(fmt::format("depth {} exceeds realized depth {}", depth, realization.depth()));
  }
  if (level_size(realization.spec(), depth) > kLeafCap) {
    throw InvalidArgument(fmt::format("level {} has more than {} cylinders", depth, kLeafCap));
  }
  Word word;
  auto walk = [&](auto&& self, const Interval& iv) -> void {
    if (word.length() == depth) {
      visit(static_cast<const Word&>(word), iv);
      return;
    }
    const auto kids = realization.children(word, iv);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      self(self, kids[i]);
      word.pop_back();
    }
  };
  walk(walk, realization.interval(Word{}));
}

/// Positive-mass leaves at the realized depth as (interval, log mass).
template <class Visit>
void for_each_live_leaf(const MoranMeasure& measure, const IntervalRealization& realization, Visit&& visit) {
  const std::size_t depth = realization.depth();
  if (level_size(realization.spec(), depth) > kLeafCap) {
    throw InvalidArgument(fmt::format("level {} has more than {} cylinders", depth, kLeafCap));
  }
  Word word;
  auto walk = [&](auto&& self, const Interval& iv, double log_mass) -> void {
    if (log_mass == numeric::kNegInf) return;
    if (word.length() == depth) {
      visit(iv, log_mass);
      return;
    }
    const auto kids = realization.children(word, iv);
    const auto p = measure.offspring_weights(word, true);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      self(self, kids[i], p[i] == 0.0 ? numeric::kNegInf : log_mass + std::log(p[i]));
      word.pop_back();
    }
  };
  walk(walk, realization.interval(Word{}), std::log(measure.root_mass()));
}

void require_same_spec(const MoranMeasure& measure, const IntervalRealization& realization) {
  if (!same_construction(measure.spec(), realization.spec(), std::min<std::size_t>(realization.depth(), 64))) {
    throw InvalidArgument("measure and realization use different constructions");
  }
}

}  // namespace

PointCloud make_point_cloud(std::vector<double> points, std::string provenance) {
  if (points.empty()) throw InvalidArgument("point cloud is empty");
  for (double p : points) {
    if (!std::isfinite(p)) throw InvalidArgument("point cloud contains a non-finite value");
  }
  std::sort(points.begin(), points.end());
  return {std::move(points), std::move(provenance)};
}

PointCloud cylinder_midpoints(const IntervalRealization& realization, std::size_t depth) {
  std::vector<double> points;
  for_each_leaf(realization, depth, [&](const Word&, const Interval& iv) { points.push_back(iv.midpoint()); });
  return make_point_cloud(std::move(points), fmt::format("midpoints depth={}", depth));
}

PointCloud sampled_cloud(const IntervalRealization& realization, const MoranMeasure& measure, std::size_t count,
                         std::uint64_t seed) {
  return make_point_cloud(sample_points(realization, measure, count, seed),
                          fmt::format("sampled count={} seed={}", count, seed));
}

ScaleRange geometric_scales(double largest, double base, std::size_t count, double bound) {
  if (!(largest > 0.0) || !std::isfinite(largest)) throw InvalidArgument("largest radius must be positive");
  if (!(base > 0.0 && base < 1.0)) throw InvalidArgument("scale base must lie in (0, 1)");
  if (count == 0) throw InvalidArgument("scale count must be positive");
  if (bound > 0.0 && !(largest < bound)) {
    throw InvalidArgument(fmt::format("largest radius {} is not below {}", largest, bound));
  }
  ScaleRange out;
  out.base = base;
  double r = largest;
  for (std::size_t i = 0; i < count; ++i, r *= base) {
    if (!(r > 0.0)) throw InvalidArgument("scale grid underflows");
    out.r_values.push_back(r);
  }
  return out;
}

BoxCountResult box_count_dimension(const PointCloud& cloud, const ScaleRange& scales) {
  if (cloud.points.empty()) throw InvalidArgument("point cloud is empty");
  if (scales.r_values.size() < 4) throw InvalidArgument("box counting needs at least 4 scales");
  BoxCountResult out;
  const auto count_boxes = [&](double r, double offset) {
    std::size_t count = 0;
    double last = std::numeric_limits<double>::quiet_NaN();
    for (double p : cloud.points) {
      const double box = std::floor((p - offset) / r);
      if (!(box == last)) {
        ++count;
        last = box;
      }
    }
    return count;
  };
  std::vector<double> xs, ys;
  for (double r : scales.r_values) {
    if (!(r > 0.0)) throw InvalidArgument("box side must be positive");
    const auto a = count_boxes(r, 0.0);
    const auto b = count_boxes(r, r / 2);
    out.counts_offset_zero.push_back(a);
    out.counts_offset_half.push_back(b);
    out.counts.push_back((static_cast<double>(a) + static_cast<double>(b)) / 2);
    xs.push_back(-std::log(r));
    ys.push_back(std::log(out.counts.back()));
  }
  if (cloud.points.front() == cloud.points.back()) {
    out.warning = "degenerate point cloud: all points coincide";
    return out;
  }
  const auto fit = numeric::least_squares(xs, ys);
  out.slope = fit.slope;
  out.residual = fit.residual;
  return out;
}

double ball_log_mass(const MoranMeasure& measure, const IntervalRealization& realization, double x, double r) {
  if (!(r > 0.0)) throw InvalidArgument("ball radius must be positive");
  const Coordinate slack = boundary_slack(x, r);
  const Coordinate lo = static_cast<Coordinate>(x) - static_cast<Coordinate>(r) - slack;
  const Coordinate hi = static_cast<Coordinate>(x) + static_cast<Coordinate>(r) + slack;
  const std::size_t depth = realization.depth();
  double total = numeric::kNegInf;
  Word word;
  auto walk = [&](auto&& self, const Interval& iv, double log_mass) -> void {
    if (log_mass == numeric::kNegInf || iv.right < lo || iv.left > hi) return;
    if ((iv.left >= lo && iv.right <= hi) || word.length() == depth) {
      total = numeric::log_add(total, log_mass);
      return;
    }
    const auto kids = realization.children(word, iv);
    const auto p = measure.offspring_weights(word, true);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      self(self, kids[i], p[i] == 0.0 ? numeric::kNegInf : log_mass + std::log(p[i]));
      word.pop_back();
    }
  };
  walk(walk, realization.interval(Word{}), std::log(measure.root_mass()));
  return total;
}

LocalSlopeEstimate local_dimension_slope(const MoranMeasure& measure, const IntervalRealization& realization,
                                         double x, const ScaleRange& scales, std::size_t tail_window) {
  require_same_spec(measure, realization);
  const Interval root = realization.interval(Word{});
  const auto xq = static_cast<Coordinate>(x);
  if (!(xq >= root.left && xq <= root.right)) {
    throw InvalidArgument(fmt::format("x = {} lies outside the root interval", x));
  }
  if (scales.r_values.empty()) throw InvalidArgument("no scales given");
  LocalSlopeEstimate out;
  for (double r : scales.r_values) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidArgument(fmt::format("radius {} outside (0, 1)", r));
    out.ratios.push_back(ball_log_mass(measure, realization, x, r) / std::log(r));
  }
  out.tail_window = tail_window == 0 ? numeric::default_tail_window(out.ratios.size()) : tail_window;
  if (out.tail_window > out.ratios.size()) throw InvalidArgument("tail window exceeds the scale count");
  std::tie(out.lower, out.upper) = numeric::tail_min_max(out.ratios, out.tail_window);
  return out;
}

SqPackingResult sq_packing_sum(const MoranMeasure& measure, const IntervalRealization& realization,
                               double region_left, double region_right, double q, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("delta must be positive");
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument("q must be finite and >= 0");
  if (!(region_left <= region_right)) throw InvalidArgument("empty region");
  require_same_spec(measure, realization);

  std::vector<double> support;
  for_each_live_leaf(measure, realization, [&](const Interval& iv, double) {
    for (double p : {static_cast<double>(iv.left), static_cast<double>(iv.right)}) {
      if (p >= region_left && p <= region_right) support.push_back(p);
    }
  });
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());

  const double gap = 2 * delta;
  const auto evaluate = [&](std::vector<double> centers, std::vector<double> log_masses) {
    SqPackingResult r;
    numeric::CompensatedSum sum;
    for (double m : log_masses) {
      if (m != numeric::kNegInf) sum.add(std::exp(q * m));
    }
    r.value = sum.value();
    r.cardinality = centers.size();
    r.centers = std::move(centers);
    for (double m : log_masses) r.masses.push_back(std::exp(m));
    return r;
  };

  std::vector<double> centers, log_masses;
  double last = -std::numeric_limits<double>::infinity();
  for (double p : support) {
    if (p - last > gap) {
      centers.push_back(p);
      log_masses.push_back(ball_log_mass(measure, realization, p, delta));
      last = p;
    }
  }
  SqPackingResult best = evaluate(std::move(centers), std::move(log_masses));

  if (q >= 1.0 && !support.empty()) {
    std::vector<double> all_masses(support.size());
    for (std::size_t i = 0; i < support.size(); ++i) all_masses[i] = ball_log_mass(measure, realization, support[i], delta);
    std::vector<std::size_t> order(support.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return all_masses[a] > all_masses[b]; });
    std::set<double> placed;
    std::vector<double> mass_centers, mass_logs;
    for (std::size_t i : order) {
      const double p = support[i];
      const auto next = placed.lower_bound(p);
      if (next != placed.end() && !(*next - p > gap)) continue;
      if (next != placed.begin() && !(p - *std::prev(next) > gap)) continue;
      placed.insert(p);
      mass_centers.push_back(p);
      mass_logs.push_back(all_masses[i]);
    }
    auto candidate = evaluate(std::move(mass_centers), std::move(mass_logs));
    if (candidate.value > best.value) {
      candidate.mass_greedy = true;
      best = std::move(candidate);
    }
  }

  std::vector<double> sorted_centers = best.centers;
  std::sort(sorted_centers.begin(), sorted_centers.end());
  for (double p : support) {
    const auto it = std::lower_bound(sorted_centers.begin(), sorted_centers.end(), p);
    double nearest = std::numeric_limits<double>::infinity();
    if (it != sorted_centers.end()) nearest = *it - p;
    if (it != sorted_centers.begin()) nearest = std::min(nearest, p - *std::prev(it));
    if (nearest > gap) {
      best.maximal = false;
      break;
    }
  }
  return best;
}

BallCover ball_to_cylinder_cover(const IntervalRealization& realization, const std::vector<Interval>& balls) {
  if (balls.empty()) throw InvalidArgument("no balls given");
  std::vector<std::pair<Coordinate, Coordinate>> merged;
  for (const auto& b : balls) {
    if (!(b.left <= b.right)) throw InvalidArgument("ball with left > right");
    merged.emplace_back(b.left, b.right);
  }
  std::sort(merged.begin(), merged.end());
  std::vector<std::pair<Coordinate, Coordinate>> segments;
  for (const auto& s : merged) {
    if (!segments.empty() && s.first <= segments.back().second) {
      segments.back().second = std::max(segments.back().second, s.second);
    } else {
      segments.push_back(s);
    }
  }
  const auto contained = [&](const Interval& iv) {
    auto it = std::upper_bound(segments.begin(), segments.end(), std::make_pair(iv.left, iv.right),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    if (it == segments.begin()) return false;
    --it;
    return it->first <= iv.left && iv.right <= it->second;
  };
  const auto meets = [&](const Interval& iv) {
    return std::any_of(segments.begin(), segments.end(),
                       [&](const auto& s) { return s.first <= iv.right && iv.left <= s.second; });
  };

  const std::size_t depth = realization.depth();
  Word word;
  auto check = [&](auto&& self, const Interval& iv) -> void {
    if (contained(iv)) return;
    if (!meets(iv)) throw InvalidArgument(fmt::format("balls miss the cylinder {}", word.to_string()));
    if (word.length() == depth) return;
    const auto kids = realization.children(word, iv);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      self(self, kids[i]);
      word.pop_back();
    }
  };
  const Interval root = realization.interval(Word{});
  check(check, root);

  BallCover out;
  std::set<Word> all;
  for (const auto& b : balls) {
    const double log_d = std::log(static_cast<double>(b.right - b.left));
    std::size_t count = 0;
    auto collect = [&](auto&& self, const Interval& iv) -> void {
      if (iv.right < b.left || iv.left > b.right) return;
      if (realization.log_diameter(word) <= log_d + numeric::kLogTieTolerance) {
        all.insert(word);
        ++count;
        return;
      }
      if (word.length() == depth) {
        throw InvalidArgument(fmt::format("ball of diameter {} is below the realized resolution",
                                          static_cast<double>(b.right - b.left)));
      }
      const auto kids = realization.children(word, iv);
      for (std::size_t i = 0; i < kids.size(); ++i) {
        word.push_back(static_cast<Word::Index>(i + 1));
        self(self, kids[i]);
        word.pop_back();
      }
    };
    collect(collect, root);
    out.per_ball.push_back(count);
    out.max_per_ball = std::max(out.max_per_ball, count);
  }
  out.words.assign(all.begin(), all.end());
  return out;
}

std::string box_count_csv(const ScaleRange& scales, const BoxCountResult& result) {
  std::string out = "scale,count,count_offset_zero,count_offset_half\n";
  for (std::size_t i = 0; i < scales.r_values.size() && i < result.counts.size(); ++i) {
    out += fmt::format("{},{},{},{}\n", scales.r_values[i], result.counts[i], result.counts_offset_zero[i],
                       result.counts_offset_half[i]);
  }
  return out;
}

std::string local_slope_csv(const ScaleRange& scales, const LocalSlopeEstimate& result) {
  std::string out = "scale,ratio\n";
  for (std::size_t i = 0; i < scales.r_values.size() && i < result.ratios.size(); ++i) {
    out += fmt::format("{},{}\n", scales.r_values[i], result.ratios[i]);
  }
  return out;
}

}  // namespace moran
