#include "moran_cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include <moran/codetree.hpp>
#include <moran/dimension.hpp>
#include <moran/entropy.hpp>
#include <moran/error.hpp>
#include <moran/estimation.hpp>
#include <moran/filtration.hpp>
#include <moran/lq_spectrum.hpp>
#include <moran/numeric.hpp>
#include <moran/realization.hpp>
#include <moran/serialize.hpp>

namespace moran::cli {
namespace {

constexpr std::uint64_t kJsonIntervalCap = 1u << 16;

struct Report {
  Json result;
  std::string csv;
  std::string message;
  bool hard_failure = false;
};

MoranMeasure measure_of(const RunConfig& c, const ConstructionSpec& spec) {
  if (!c.weight_rule) return make_uniform_measure(spec);
  return make_weighted_measure(spec, weight_rule_from_json(*c.weight_rule));
}

IntervalRealization realization_of(const RunConfig& c, const ConstructionSpec& spec, std::size_t depth) {
  switch (c.gap_rule) {
    case GapRule::explicit_map: {
      std::map<Word, std::pair<Coordinate, Coordinate>> intervals;
      for (const auto& iv : c.intervals) {
        intervals[iv.word] = {static_cast<Coordinate>(iv.left), static_cast<Coordinate>(iv.right)};
      }
      return IntervalRealization::from_intervals(spec, std::move(intervals));
    }
    case GapRule::uniformly_perfect:
      return uniformly_perfect_example(c.eta, depth);
    default:
      return realize_on_interval(spec, c.gap_rule, depth);
  }
}

/// Sampled path long enough for the level-`depth` member of the filtration.
Word sampled_path(const MoranMeasure& measure, const GeneralFiltration& filtration, std::size_t depth,
                  std::uint64_t seed) {
  const double threshold = filtration.log_threshold(depth);
  for (std::size_t length = depth;; length *= 2) {
    PathSampler sampler(measure, seed);
    Word path = sampler.sample(length);
    if (cylinder_log_diameter(measure.spec(), path) <= threshold) return path;
    if (length > (std::size_t{1} << 20)) throw InvalidArgument("cylinder diameters do not shrink along the path");
  }
}

Report run_dim(const RunConfig& c, const ConstructionSpec& spec) {
  const auto report = dimension_report(spec, c.depth, c.tail_window, c.tolerance);
  return {to_json(report), dimension_report_csv(report),
          fmt::format("s_* = {:.10f}, s^* = {:.10f}", report.s_star, report.s_upper_star)};
}

Report run_local_dim(const RunConfig& c, const ConstructionSpec& spec) {
  const auto measure = measure_of(c, spec);
  const auto filtration = build_symbolic_filtration(spec, c.depth);
  const Word path = c.path ? *c.path : sampled_path(measure, filtration, c.depth, c.seed);
  const auto trace = entropy_average_ratio(measure, path, c.depth);
  std::vector<double> ratios(c.depth);
  for (std::size_t k = 0; k < c.depth; ++k) {
    const double den = trace.denominator_partial[k];
    ratios[k] = den == 0.0 ? 0.0 : trace.numerator_partial[k] / den;
  }
  const auto [lo, hi] = numeric::tail_min_max(ratios, c.tail_window);
  const auto estimate = local_dim_via_filtration(measure, filtration, path, c.tail_window);
  Json result{{"path", path.to_string()},
              {"entropy_average", to_json(trace)},
              {"entropy_lower", lo},
              {"entropy_upper", hi},
              {"filtration", to_json(estimate)}};
  return {result, entropy_trace_csv(trace),
          fmt::format("local dimension in [{:.6f}, {:.6f}] (entropy averages)", lo, hi)};
}

Report run_lq(const RunConfig& c, const ConstructionSpec& spec) {
  const auto measure = measure_of(c, spec);
  const auto dims = lq_dimensions(measure, c.q_grid, c.depth, c.tail_window);
  Json list = Json::array();
  std::string csv = "q,tau,dimension\n";
  for (const auto& d : dims) {
    list.push_back(to_json(d));
    csv += fmt::format("{},{},{}\n", d.q, d.spectrum.tau, d.dimension);
  }
  Json result{{"dimensions", list}};
  const bool straddles = std::any_of(c.q_grid.begin(), c.q_grid.end(), [](double q) { return q < 1.0; }) &&
                         std::any_of(c.q_grid.begin(), c.q_grid.end(), [](double q) { return q > 1.0; });
  std::string message = fmt::format("{} L^q dimensions", dims.size());
  if (straddles) {
    const auto sandwich = dim_at_one_sandwich_check(measure, c.depth, c.q_grid, kSandwichSlack, c.path_sample, c.seed);
    result["sandwich"] = to_json(sandwich);
    message += sandwich.sandwich_holds ? ", sandwich holds" : ", sandwich violated";
  }
  return {result, csv, message};
}

Json intervals_json(const IntervalRealization& realization, std::size_t depth) {
  Json list = Json::array();
  std::uint64_t emitted = 0;
  Word word;
  auto visit = [&](auto&& self, const Interval& iv) -> void {
    if (++emitted > kJsonIntervalCap) {
      throw InvalidArgument(fmt::format("more than {} intervals; use csv output", kJsonIntervalCap));
    }
    list.push_back(Json{{"word", word.to_string()},
                        {"left", static_cast<double>(iv.left)},
                        {"right", static_cast<double>(iv.right)}});
    if (word.length() == depth) return;
    const auto kids = realization.children(word, iv);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      self(self, kids[i]);
      word.pop_back();
    }
  };
  visit(visit, realization.interval(Word{}));
  return list;
}

Report run_realize(const RunConfig& c, const ConstructionSpec& spec) {
  const auto realization = realization_of(c, spec, c.depth);
  const std::size_t depth = std::min(c.depth, realization.depth());
  Report r;
  r.result = Json{{"gap_rule", to_string(realization.gap_rule())},
                  {"depth", depth},
                  {"touching_flagged", realization.touching_flagged()},
                  {"c0_certified", realization.c0_certified()}};
  if (c.format == Format::json) {
    r.result["intervals"] = intervals_json(realization, depth);
  } else {
    r.csv = realization_csv(realization, depth);
  }
  r.message = fmt::format("realized {} levels", depth);
  return r;
}

ScaleRange scales_of(const RunConfig& c) { return geometric_scales(c.scale_largest, c.scale_base, c.scale_count); }

Report run_estimate(const RunConfig& c, const ConstructionSpec& spec) {
  const auto realization = realization_of(c, spec, c.depth);
  Report r;
  switch (*c.estimator) {
    case Estimator::box: {
      const auto cloud = cylinder_midpoints(realization, std::min(c.depth, realization.depth()));
      const auto scales = scales_of(c);
      const auto result = box_count_dimension(cloud, scales);
      r.result = to_json(result);
      r.result["scales"] = to_json(scales);
      r.csv = box_count_csv(scales, result) + fmt::format("# slope={} residual={}\n", result.slope, result.residual);
      r.message = fmt::format("box-counting slope {:.6f} (residual {:.2e})", result.slope, result.residual);
      break;
    }
    case Estimator::local: {
      const auto measure = measure_of(c, realization.spec());
      const double x = c.x ? *c.x : sample_points(realization, measure, 1, c.seed).front();
      const auto scales = scales_of(c);
      const auto result = local_dimension_slope(measure, realization, x, scales);
      r.result = to_json(result);
      r.result["x"] = x;
      r.result["scales"] = to_json(scales);
      r.csv = local_slope_csv(scales, result);
      r.message = fmt::format("local slope in [{:.6f}, {:.6f}] at x = {}", result.lower, result.upper, x);
      break;
    }
    case Estimator::sq: {
      const auto measure = measure_of(c, realization.spec());
      const Interval root = realization.interval(Word{});
      const auto region = c.region.value_or(std::make_pair(static_cast<double>(root.left),
                                                           static_cast<double>(root.right)));
      const auto result = sq_packing_sum(measure, realization, region.first, region.second, c.sq_q, c.delta);
      r.result = to_json(result);
      r.csv = fmt::format("delta,q,S_q,cardinality\n{},{},{},{}\n", c.delta, c.sq_q, result.value,
                          result.cardinality);
      r.message = fmt::format("S_q = {} with {} balls", result.value, result.cardinality);
      break;
    }
  }
  return r;
}

Report run_verify(const RunConfig& c, const ConstructionSpec& spec) {
  const auto realization = realization_of(c, spec, c.depth);
  const std::size_t depth = std::min(c.depth, realization.depth());
  if (depth < 1) throw InvalidArgument("realization has no levels to verify");
  const auto axioms = verify_moran_axioms(realization, depth, std::min(c.tail_window, depth));
  Report r;
  r.result = Json{{"moran_axioms", to_json(axioms)}};
  std::string csv = "check,pass\n";
  for (const auto& [name, ok] : {std::pair{"M1", axioms.m1}, {"M2", axioms.m2}, {"M3", axioms.m3},
                                 {"M4", axioms.m4}, {"M5", axioms.m5}}) {
    csv += fmt::format("{},{}\n", name, ok);
  }
  if (axioms.hard_failure()) {
    r.hard_failure = true;
    r.csv = csv;
    r.message = axioms.diagnostics.empty() ? "Moran axioms fail" : axioms.diagnostics.front();
    return r;
  }
  const std::size_t filtration_depth = realization.rule_based() ? depth : depth - 1;
  if (filtration_depth >= 4) {
    const auto filtration = build_filtration(realization, filtration_depth);
    const auto report = verify_filtration_axioms(filtration, std::min(c.tail_window, filtration_depth / 2));
    r.result["filtration_axioms"] = to_json(report);
    for (const auto& [name, ok] : {std::pair{"F1", report.f1}, {"F2", report.f2}, {"F3", report.f3.pass},
                                   {"F4", report.f4.pass}}) {
      csv += fmt::format("{},{}\n", name, ok);
    }
    if (report.hard_failure()) {
      r.hard_failure = true;
      r.message = report.diagnostics.front();
    }
  }
  r.csv = csv;
  if (r.message.empty()) r.message = axioms.all_pass() ? "Moran axioms pass" : "soft Moran axiom failures reported";
  return r;
}

Report run_conditions(const RunConfig& c, const ConstructionSpec& spec) {
  const auto measure = measure_of(c, spec);
  const auto report = check_entropy_conditions(measure, c.depth, c.path_sample, c.seed);
  std::string csv = "n,summand,partial_sum,diamspeed\n";
  for (std::size_t i = 0; i < report.l2_summands.size(); ++i) {
    csv += fmt::format("{},{},{},{}\n", i + 1, report.l2_summands[i], report.l2_partial_sums[i],
                       report.diamspeed_values[i]);
  }
  return {to_json(report), csv, fmt::format("square-summability: {}", to_string(report.verdict))};
}

}  // namespace

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const AxiomViolation*>(&error)) return kAxiomFailure;
  if (dynamic_cast<const NonConvergence*>(&error)) return kNonConvergence;
  return kConfigError;
}

RunOutcome run(const RunConfig& config) {
  RunOutcome outcome;
  try {
    const auto spec = spec_from_json(config.spec);
    Report report;
    switch (config.command) {
      case Command::dim: report = run_dim(config, spec); break;
      case Command::local_dim: report = run_local_dim(config, spec); break;
      case Command::lq: report = run_lq(config, spec); break;
      case Command::realize: report = run_realize(config, spec); break;
      case Command::estimate: report = run_estimate(config, spec); break;
      case Command::verify: report = run_verify(config, spec); break;
      case Command::conditions: report = run_conditions(config, spec); break;
    }
    const Json echo = config_to_json(config);
    if (config.format == Format::json) {
      Json doc{{"config", echo}, {"command", to_string(config.command)}, {"result", report.result}};
      outcome.output = doc.dump(2) + "\n";
    } else {
      outcome.output = "# config: " + echo.dump() + "\n" + report.csv;
    }
    outcome.message = report.message;
    outcome.exit_code = report.hard_failure ? kAxiomFailure : kSuccess;
  } catch (const Error& e) {
    outcome.exit_code = exit_code_for(e);
    outcome.message = e.what();
  } catch (const nlohmann::json::exception& e) {
    outcome.exit_code = kConfigError;
    outcome.message = e.what();
  }
  return outcome;
}

}  // namespace moran::cli
