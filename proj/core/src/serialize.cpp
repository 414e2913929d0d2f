#include "moran/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string_view>

#include <fmt/format.h>

#include "moran/error.hpp"

namespace moran {
namespace {

void check_keys(const Json& doc, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!doc.is_object()) throw InvalidArgument(fmt::format("{}: expected a JSON object", context));
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidArgument(fmt::format("{}: unknown key \"{}\"", context, key));
    }
  }
}

const Json& require(const Json& doc, const char* key, std::string_view context) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw InvalidArgument(fmt::format("{}: missing key \"{}\"", context, key));
  return *it;
}

/// NaN and infinities become null.
Json number(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

Json numbers(const std::vector<double>& values) {
  Json out = Json::array();
  for (double v : values) out.push_back(number(v));
  return out;
}

Json level_to_json(const Level& level) { return Json{{"N", level.branching}, {"ratios", level.ratios}}; }

Level level_from_json(const Json& doc) {
  check_keys(doc, {"N", "ratios"}, "level");
  Level level;
  level.branching = require(doc, "N", "level").get<std::uint32_t>();
  level.ratios = require(doc, "ratios", "level").get<std::vector<double>>();
  if (level.ratios.size() != level.branching) {
    throw InvalidArgument(fmt::format("level: N = {} but {} ratios", level.branching, level.ratios.size()));
  }
  return level;
}

Json levels_to_json(const std::vector<Level>& levels) {
  Json out = Json::array();
  for (const auto& l : levels) out.push_back(level_to_json(l));
  return out;
}

std::vector<Level> levels_from_json(const Json& doc) {
  if (!doc.is_array()) throw InvalidArgument("levels: expected an array");
  std::vector<Level> out;
  for (const auto& l : doc) out.push_back(level_from_json(l));
  return out;
}

template <class F>
auto translate_json_errors(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

Json spec_to_json(const ConstructionSpec& spec) {
  Json doc;
  doc["kind"] = to_string(spec.kind());
  doc["root_diameter"] = spec.root_diameter();
  doc["levels"] = levels_to_json(spec.prefix_levels());
  std::visit(
      [&](const auto& tail) {
        using T = std::decay_t<decltype(tail)>;
        if constexpr (std::is_same_v<T, PeriodicTail>) {
          doc["tail"] = Json{{"rule", "periodic"}, {"cycle", levels_to_json(tail.cycle)}};
        } else if constexpr (std::is_same_v<T, DoublingBlocksTail>) {
          doc["tail"] = Json{{"rule", "doubling_blocks"},
                             {"first", level_to_json(tail.first)},
                             {"second", level_to_json(tail.second)}};
        } else if constexpr (std::is_same_v<T, LogLinearTail>) {
          doc["tail"] = Json{{"rule", "log_linear"}, {"offsets", tail.offsets}, {"slopes", tail.slopes}};
        } else {
          throw InvalidArgument("spec with tail rule \"" + tail.label + "\" cannot be serialized");
        }
      },
      spec.tail());
  if (spec.perturbation()) {
    doc["perturbation"] = Json{{"amplitude", spec.perturbation()->amplitude}, {"seed", spec.perturbation()->seed}};
  }
  return doc;
}

ConstructionSpec spec_from_json(const Json& doc) {
  return translate_json_errors([&] {
    check_keys(doc, {"kind", "root_diameter", "levels", "tail", "perturbation"}, "spec");
    const auto kind = construction_kind_from_string(require(doc, "kind", "spec").get<std::string>());
    const double root = doc.contains("root_diameter") ? doc["root_diameter"].get<double>() : 1.0;
    std::vector<Level> prefix = doc.contains("levels") ? levels_from_json(doc["levels"]) : std::vector<Level>{};
    TailRule tail;
    if (!doc.contains("tail")) {
      if (prefix.empty()) throw InvalidArgument("spec: needs explicit levels or a tail rule");
      tail = PeriodicTail{std::move(prefix)};
      prefix.clear();
    } else {
      const Json& t = doc["tail"];
      const auto rule = require(t, "rule", "tail").get<std::string>();
      if (rule == "periodic") {
        check_keys(t, {"rule", "cycle"}, "tail");
        tail = PeriodicTail{levels_from_json(require(t, "cycle", "tail"))};
      } else if (rule == "doubling_blocks") {
        check_keys(t, {"rule", "first", "second"}, "tail");
        tail = DoublingBlocksTail{level_from_json(require(t, "first", "tail")),
                                  level_from_json(require(t, "second", "tail"))};
      } else if (rule == "log_linear") {
        check_keys(t, {"rule", "offsets", "slopes"}, "tail");
        tail = LogLinearTail{require(t, "offsets", "tail").get<std::vector<double>>(),
                             require(t, "slopes", "tail").get<std::vector<double>>()};
      } else {
        throw InvalidArgument("tail: unknown rule \"" + rule + "\"");
      }
    }
    std::optional<JitterPerturbation> perturbation;
    if (doc.contains("perturbation")) {
      const Json& p = doc["perturbation"];
      check_keys(p, {"amplitude", "seed"}, "perturbation");
      perturbation = JitterPerturbation{require(p, "amplitude", "perturbation").get<double>(),
                                        p.contains("seed") ? p["seed"].get<std::uint64_t>() : 0};
    }
    return ConstructionSpec(std::move(prefix), std::move(tail), kind, root, perturbation);
  });
}

Json weight_rule_to_json(const WeightRule& rule) {
  return std::visit(
      [](const auto& r) -> Json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, UniformWeights>) {
          return Json{{"name", "uniform"}};
        } else if constexpr (std::is_same_v<T, LevelWeights>) {
          if (r.levels.size() == 1 && r.cycle) return Json{{"name", "bernoulli"}, {"weights", r.levels.front()}};
          return Json{{"name", "level_weights"}, {"levels", r.levels}, {"cycle", r.cycle}};
        } else {
          throw InvalidArgument("weight rule \"" + r.label + "\" cannot be serialized");
        }
      },
      rule);
}

WeightRule weight_rule_from_json(const Json& doc) {
  return translate_json_errors([&]() -> WeightRule {
    if (!doc.is_object()) throw InvalidArgument("weight_rule: expected a JSON object");
    const auto name = require(doc, "name", "weight_rule").get<std::string>();
    if (name == "uniform") {
      check_keys(doc, {"name"}, "weight_rule");
      return UniformWeights{};
    }
    if (name == "bernoulli") {
      check_keys(doc, {"name", "weights"}, "weight_rule");
      return bernoulli_weights(require(doc, "weights", "weight_rule").get<std::vector<double>>());
    }
    if (name == "level_weights") {
      check_keys(doc, {"name", "levels", "cycle"}, "weight_rule");
      LevelWeights w;
      w.levels = require(doc, "levels", "weight_rule").get<std::vector<std::vector<double>>>();
      if (doc.contains("cycle")) w.cycle = doc["cycle"].get<bool>();
      return w;
    }
    throw InvalidArgument("weight_rule: unknown name \"" + name + "\"");
  });
}

Json measure_to_json(const MoranMeasure& measure) {
  return Json{{"spec", spec_to_json(measure.spec())},
              {"weight_rule", weight_rule_to_json(measure.rule())},
              {"root_mass", measure.root_mass()}};
}

MoranMeasure measure_from_json(const Json& doc) {
  return translate_json_errors([&] {
    check_keys(doc, {"spec", "weight_rule", "root_mass"}, "measure");
    const double root_mass = doc.contains("root_mass") ? doc["root_mass"].get<double>() : 1.0;
    return make_weighted_measure(spec_from_json(require(doc, "spec", "measure")),
                                 weight_rule_from_json(require(doc, "weight_rule", "measure")), root_mass);
  });
}

Json to_json(const DimensionReport& r) {
  return Json{{"s_sequence", numbers(r.s_sequence)},
              {"residuals", numbers(r.residuals)},
              {"s_star", number(r.s_star)},
              {"s_upper_star", number(r.s_upper_star)},
              {"tail_window", r.tail_window},
              {"solver_tolerance", r.solver_tolerance},
              {"oscillation_last", number(r.oscillation_last)},
              {"oscillation_previous", number(r.oscillation_previous)}};
}

Json to_json(const HomogeneousDimension& r) {
  return Json{{"liminf_estimate", number(r.liminf_estimate)},
              {"limsup_estimate", number(r.limsup_estimate)},
              {"ratios", numbers(r.ratios)}};
}

Json to_json(const EntropyAverageTrace& t) {
  return Json{{"path", t.path.to_string()},
              {"depth", t.depth},
              {"numerator", number(t.numerator)},
              {"denominator", number(t.denominator)},
              {"ratio", number(t.ratio)}};
}

Json to_json(const ConditionReport& r) {
  return Json{{"l2_summands", numbers(r.l2_summands)},
              {"l2_partial_sums", numbers(r.l2_partial_sums)},
              {"diamspeed_values", numbers(r.diamspeed_values)},
              {"sup_exact", r.sup_exact},
              {"decay_slope", number(r.decay_slope)},
              {"verdict", to_string(r.verdict)},
              {"diamspeed_liminf_estimate", number(r.diamspeed_liminf_estimate)}};
}

Json to_json(const LqSpectrumEstimate& e) {
  return Json{{"q", e.q},
              {"tau", number(e.tau)},
              {"tau_sequence", numbers(e.tau_sequence)},
              {"tail_window", e.tail_window},
              {"local", e.local}};
}

Json to_json(const LqDimension& d) {
  return Json{{"q", d.q}, {"dimension", number(d.dimension)}, {"tau", number(d.spectrum.tau)}};
}

Json to_json(const SandwichReport& r) {
  Json dims = Json::array();
  for (const auto& d : r.dimensions) dims.push_back(to_json(d));
  return Json{{"dimensions", dims},
              {"q_below", r.q_below},
              {"q_above", r.q_above},
              {"dim_below", number(r.dim_below)},
              {"dim_above", number(r.dim_above)},
              {"lower_local", numbers(r.lower_local)},
              {"upper_local", numbers(r.upper_local)},
              {"sandwich_holds", r.sandwich_holds},
              {"monotone", r.monotone},
              {"slack", r.slack}};
}

namespace {
Json trend_json(const RatioTrend& t) {
  return Json{{"final_deviation", number(t.final_deviation)},
              {"extrapolated_deviation", number(t.extrapolated_deviation)},
              {"decreasing", t.decreasing},
              {"pass", t.pass}};
}
}  // namespace

Json to_json(const FiltrationAxiomReport& r) {
  return Json{{"F1", r.f1},
              {"F1_first_violation", r.f1_first_violation},
              {"F2", r.f2},
              {"F3", trend_json(r.f3)},
              {"F4", trend_json(r.f4)},
              {"disjoint", r.disjoint},
              {"all_pass", r.all_pass()},
              {"diagnostics", r.diagnostics}};
}

Json to_json(const LocalDimensionEstimate& e) {
  return Json{{"lower", number(e.lower)},
              {"upper", number(e.upper)},
              {"ratios", numbers(e.ratios)},
              {"tail_window", e.tail_window}};
}

Json to_json(const MoranAxiomReport& r) {
  return Json{{"depth", r.depth},
              {"exact_depth", r.exact_depth},
              {"M1", r.m1},
              {"M2", r.m2},
              {"M3", r.m3},
              {"M4", r.m4},
              {"M5", r.m5},
              {"c0_certified", number(r.c0_certified)},
              {"max_length_error", number(r.max_length_error)},
              {"m5_final_deviation", number(r.m5_final_deviation)},
              {"m5_extrapolated_deviation", number(r.m5_extrapolated_deviation)},
              {"all_pass", r.all_pass()},
              {"diagnostics", r.diagnostics}};
}

Json to_json(const BoxCountResult& r) {
  return Json{{"slope", number(r.slope)},
              {"residual", number(r.residual)},
              {"counts", numbers(r.counts)},
              {"warning", r.warning}};
}

Json to_json(const LocalSlopeEstimate& r) {
  return Json{{"lower", number(r.lower)},
              {"upper", number(r.upper)},
              {"ratios", numbers(r.ratios)},
              {"tail_window", r.tail_window}};
}

Json to_json(const SqPackingResult& r) {
  return Json{{"value", number(r.value)},
              {"cardinality", r.cardinality},
              {"mass_greedy", r.mass_greedy},
              {"maximal", r.maximal}};
}

Json to_json(const ScaleRange& s) { return Json{{"r_values", numbers(s.r_values)}, {"base", s.base}}; }

std::string dimension_report_csv(const DimensionReport& report) {
  std::string out = "n,s_n,residual\n";
  for (std::size_t i = 0; i < report.s_sequence.size(); ++i) {
    out += fmt::format("{},{},{}\n", i + 1, report.s_sequence[i], report.residuals[i]);
  }
  return out;
}

std::string entropy_trace_csv(const EntropyAverageTrace& trace) {
  std::string out = "n,numerator,denominator,ratio\n";
  for (std::size_t i = 0; i < trace.numerator_partial.size(); ++i) {
    const double num = trace.numerator_partial[i];
    const double den = trace.denominator_partial[i];
    out += fmt::format("{},{},{},{}\n", i + 1, num, den, den == 0.0 ? 0.0 : num / den);
  }
  return out;
}

std::string tau_sequence_csv(const LqSpectrumEstimate& estimate) {
  std::string out = "n,tau_n\n";
  for (std::size_t i = 0; i < estimate.tau_sequence.size(); ++i) {
    out += fmt::format("{},{}\n", i + 1, estimate.tau_sequence[i]);
  }
  return out;
}

}  // namespace moran
