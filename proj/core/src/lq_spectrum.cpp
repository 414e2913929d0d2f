#include "moran/lq_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "moran/codetree.hpp"
#include "moran/cylinder_classes.hpp"
#include "moran/entropy.hpp"
#include "moran/error.hpp"
#include "moran/numeric.hpp"

namespace moran {
namespace {

void require_q(double q) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw InvalidArgument(fmt::format("q must be finite and >= 0, got {}", q));
}

/// Start of the symbolic ball B(x, r): the shortest prefix of x whose
/// cylinder diameter is at most r.
Word ball_root(const GeneralFiltration& filtration, const Word& x, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("radius must be positive");
  const double log_r = std::log(radius);
  Word walk;
  for (std::size_t j = 0;; ++j) {
    if (filtration.log_diameter(walk) <= log_r + numeric::kLogTieTolerance) return walk;
    if (j == x.length()) break;
    walk.push_back(x.at_level(j + 1));
  }
  throw InvalidArgument(fmt::format("path {} too short for the ball of radius {}", x.to_string(), radius));
}

/// log Σ_{Q} μ(Q)^q for each q over an explicit word list; zero masses skipped.
void explicit_moments(const MoranMeasure& measure, const std::vector<Word>& words, std::span<const double> qs,
                      std::vector<double>& out) {
  std::vector<double> log_masses;
  for (const auto& w : words) {
    const double m = cylinder_log_mass(measure, w);
    if (m != numeric::kNegInf) log_masses.push_back(m);
  }
  out.assign(qs.size(), numeric::kNegInf);
  std::vector<double> terms(log_masses.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    for (std::size_t j = 0; j < log_masses.size(); ++j) terms[j] = qs[i] * log_masses[j];
    out[i] = numeric::log_sum_exp(terms);
  }
}

}  // namespace

std::vector<LqSpectrumEstimate> lq_spectrum_multi(const MoranMeasure& measure, const GeneralFiltration& filtration,
                                                  std::span<const double> qs, const LqOptions& options) {
  for (double q : qs) require_q(q);
  if (qs.empty()) throw InvalidArgument("no q values given");
  const std::size_t depth = options.depth == 0 ? filtration.depth() : options.depth;
  if (depth < 1 || depth > filtration.depth()) {
    throw InvalidArgument(fmt::format("depth {} outside 1..{}", depth, filtration.depth()));
  }
  const std::size_t window = options.tail_window == 0 ? numeric::default_tail_window(depth) : options.tail_window;
  if (window > depth) throw InvalidArgument("tail window exceeds the depth");
  const bool local = options.x_path.has_value();
  if (local != options.radius.has_value()) throw InvalidArgument("local spectra need both a point and a radius");
  if (filtration.spec() && !same_construction(*filtration.spec(), measure.spec(), std::min<std::size_t>(depth, 64))) {
    throw InvalidArgument("measure and filtration use different constructions");
  }
  const auto& spec = measure.spec();

  std::vector<LqSpectrumEstimate> out(qs.size());
  for (std::size_t i = 0; i < qs.size(); ++i) {
    out[i].q = qs[i];
    out[i].local = local;
    out[i].tail_window = window;
    out[i].tau_sequence.reserve(depth);
  }

  Word start;
  double log_start_diameter = std::numeric_limits<double>::infinity();
  if (local) {
    require_valid_word(spec, *options.x_path);
    start = ball_root(filtration, *options.x_path, *options.radius);
    log_start_diameter = filtration.log_diameter(start);
  }
  const bool hand_built = filtration.source() == GeneralFiltration::Source::hand_built;
  std::optional<AntichainRefiner> refiner;
  if (!hand_built) refiner.emplace(spec, &measure, start, filtration.diameter_override());

  std::vector<double> log_sums(qs.size());
  for (std::size_t n = 1; n <= depth; ++n) {
    if (hand_built) {
      std::vector<Word> members;
      for (const auto& w : filtration.explicit_levels()[n - 1]) {
        if (!local || start.is_prefix_of(w) || w.is_prefix_of(start)) members.push_back(w);
      }
      explicit_moments(measure, members, qs, log_sums);
    } else if (local && log_start_diameter <= filtration.log_threshold(n)) {
      // The member containing x is an ancestor of the ball root: it is the
      // only member meeting the ball.
      const double m = cylinder_log_mass(measure, filtration.member_containing(n, *options.x_path));
      for (std::size_t i = 0; i < qs.size(); ++i) log_sums[i] = m == numeric::kNegInf ? m : qs[i] * m;
    } else {
      refiner->refine(filtration.log_threshold(n));
      for (std::size_t i = 0; i < qs.size(); ++i) log_sums[i] = refiner->log_moment(qs[i]);
    }
    for (std::size_t i = 0; i < qs.size(); ++i) {
      out[i].tau_sequence.push_back(log_sums[i] / filtration.log_delta(n));
    }
  }
  for (auto& est : out) est.tau = numeric::tail_min_max(est.tau_sequence, window).first;
  return out;
}

LqSpectrumEstimate lq_spectrum_symbolic(const MoranMeasure& measure, const GeneralFiltration& filtration, double q,
                                        const LqOptions& options) {
  const double qs[] = {q};
  return lq_spectrum_multi(measure, filtration, qs, options).front();
}

std::vector<LqSpectrumEstimate> lq_spectrum_local(const MoranMeasure& measure, const GeneralFiltration& filtration,
                                                  double q, const Word& x_path, std::span<const double> radii,
                                                  std::size_t depth, std::size_t tail_window) {
  for (std::size_t i = 1; i < radii.size(); ++i) {
    if (!(radii[i] < radii[i - 1])) throw InvalidArgument("radius grid must be strictly decreasing");
  }
  std::vector<LqSpectrumEstimate> out;
  for (double r : radii) {
    LqOptions options;
    options.x_path = x_path;
    options.radius = r;
    options.depth = depth;
    options.tail_window = tail_window;
    out.push_back(lq_spectrum_symbolic(measure, filtration, q, options));
  }
  return out;
}

std::vector<LqDimension> lq_dimensions(const MoranMeasure& measure, std::span<const double> qs, std::size_t depth,
                                       std::size_t tail_window) {
  for (double q : qs) {
    require_q(q);
    if (q == 1.0) throw InvalidArgument("L^q dimension is undefined at q = 1");
  }
  const auto filtration = build_symbolic_filtration(measure.spec(), depth);
  LqOptions options;
  options.tail_window = tail_window;
  const auto spectra = lq_spectrum_multi(measure, filtration, qs, options);
  std::vector<LqDimension> out;
  for (const auto& s : spectra) out.push_back({s.q, s.tau / (s.q - 1.0), s});
  return out;
}

LqDimension lq_dimension(const MoranMeasure& measure, double q, std::size_t depth, std::size_t tail_window) {
  const double qs[] = {q};
  return lq_dimensions(measure, qs, depth, tail_window).front();
}

std::vector<double> default_q_grid() { return {0.5, 0.9, 0.99, 1.01, 1.1, 2.0}; }

SandwichReport dim_at_one_sandwich_check(const MoranMeasure& measure, std::size_t depth,
                                         std::span<const double> q_grid, double slack, std::size_t paths,
                                         std::uint64_t seed, std::size_t path_depth) {
  std::vector<double> grid(q_grid.begin(), q_grid.end());
  std::sort(grid.begin(), grid.end());
  const auto above = std::upper_bound(grid.begin(), grid.end(), 1.0);
  if (above == grid.begin() || above == grid.end()) throw InvalidArgument("q grid must straddle 1");
  if (std::find(grid.begin(), grid.end(), 1.0) != grid.end()) throw InvalidArgument("q grid must exclude 1");

  SandwichReport report;
  report.slack = slack;
  report.dimensions = lq_dimensions(measure, grid, depth);
  const std::size_t below_index = static_cast<std::size_t>(above - grid.begin()) - 1;
  report.q_below = grid[below_index];
  report.q_above = grid[below_index + 1];
  report.dim_below = report.dimensions[below_index].dimension;
  report.dim_above = report.dimensions[below_index + 1].dimension;

  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (i == below_index + 1) continue;  // across 1 the map may jump up
    if (report.dimensions[i].dimension > report.dimensions[i - 1].dimension + slack) report.monotone = false;
  }

  const std::size_t n_path = path_depth == 0 ? depth : path_depth;
  const std::size_t window = numeric::default_tail_window(n_path);
  PathSampler sampler(measure, seed);
  for (std::size_t p = 0; p < paths; ++p) {
    const Word path = sampler.sample(n_path);
    const auto trace = entropy_average_ratio(measure, path, n_path);
    std::vector<double> ratios(n_path);
    for (std::size_t k = 0; k < n_path; ++k) {
      ratios[k] = trace.denominator_partial[k] == 0.0 ? 0.0
                                                      : trace.numerator_partial[k] / trace.denominator_partial[k];
    }
    const auto [lo, hi] = numeric::tail_min_max(ratios, window);
    report.lower_local.push_back(lo);
    report.upper_local.push_back(hi);
    if (lo < report.dim_above - slack || hi > report.dim_below + slack || lo > hi) report.sandwich_holds = false;
  }
  return report;
}

}  // namespace moran
