#include "moran_cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>

#include <moran/error.hpp>
#include <moran/lq_spectrum.hpp>

namespace moran::cli {
namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::dim, "dim"},           {Command::local_dim, "local-dim"}, {Command::lq, "lq"},
    {Command::realize, "realize"},   {Command::estimate, "estimate"},   {Command::verify, "verify"},
    {Command::conditions, "conditions"},
};
constexpr std::pair<Estimator, const char*> kEstimators[] = {
    {Estimator::box, "box"}, {Estimator::local, "local"}, {Estimator::sq, "sq"}};

[[noreturn]] void fail(std::string_view key, std::string_view message) {
  throw InvalidArgument(fmt::format("config {}: {}", key, message));
}

void check_keys(const Json& doc, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!doc.is_object()) fail(where.empty() ? "<root>" : where, "expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(where.empty() ? key : fmt::format("{}.{}", where, key), "unknown key");
    }
  }
}

template <class T>
T get(const Json& doc, const char* key, std::string_view path) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(path, "wrong type");
  }
}

std::size_t get_count(const Json& doc, const char* key, std::string_view path) {
  const Json& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail(path, "expected a non-negative integer");
  return v.get<std::size_t>();
}

double get_real(const Json& doc, const char* key, std::string_view path) {
  const Json& v = doc.at(key);
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

void check_q(double q, std::string_view path) {
  if (q == 1.0) fail(path, "the L^q dimension is undefined at q = 1");
  if (!(q >= 0.0)) fail(path, "q must be >= 0");
}

Json read_json_file(const std::filesystem::path& path, std::string_view key) {
  std::ifstream in(path);
  if (!in) fail(key, fmt::format("cannot open {}", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const nlohmann::json::parse_error& e) {
    fail(key, fmt::format("{} is not valid JSON: {}", path.string(), e.what()));
  }
}

}  // namespace

std::string to_string(Command command) {
  for (const auto& [c, name] : kCommands) {
    if (c == command) return name;
  }
  return "?";
}

Command command_from_string(const std::string& text) {
  for (const auto& [c, name] : kCommands) {
    if (text == name) return c;
  }
  fail("command", fmt::format("unknown command \"{}\"", text));
}

std::string to_string(Estimator estimator) {
  for (const auto& [e, name] : kEstimators) {
    if (e == estimator) return name;
  }
  return "?";
}

Estimator estimator_from_string(const std::string& text) {
  for (const auto& [e, name] : kEstimators) {
    if (text == name) return e;
  }
  fail("estimator", fmt::format("unknown estimator \"{}\" (box, local, sq)", text));
}

std::string to_string(Format format) { return format == Format::csv ? "csv" : "json"; }

Format format_from_string(const std::string& text) {
  if (text == "csv") return Format::csv;
  if (text == "json") return Format::json;
  fail("output.format", fmt::format("unknown format \"{}\" (csv, json)", text));
}

RunConfig parse_config(const Json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc,
             {"schema", "command", "estimator", "spec", "measure", "depth", "tail_window", "tolerance", "scales",
              "seed", "q", "q_grid", "path", "x", "path_sample", "realization", "sq", "output"},
             "");
  RunConfig c;
  if (doc.contains("schema")) {
    const Json& s = doc["schema"];
    if (!s.is_number_integer() || s.get<int>() != kSchemaVersion) {
      fail("schema", fmt::format("unsupported schema (expected {})", kSchemaVersion));
    }
  }
  if (!doc.contains("command")) fail("command", "missing");
  c.command = command_from_string(get<std::string>(doc, "command", "command"));
  if (doc.contains("estimator")) c.estimator = estimator_from_string(get<std::string>(doc, "estimator", "estimator"));
  if (c.command == Command::estimate && !c.estimator) fail("estimator", "required for the estimate command");
  if (c.command != Command::estimate && c.estimator) fail("estimator", "only valid for the estimate command");

  // Realization first: the uniformly perfect placement supplies its own spec.
  if (doc.contains("realization")) {
    const Json& r = doc["realization"];
    check_keys(r, {"gap_rule", "eta", "intervals"}, "realization");
    if (r.contains("gap_rule")) {
      try {
        c.gap_rule = gap_rule_from_string(get<std::string>(r, "gap_rule", "realization.gap_rule"));
      } catch (const InvalidArgument& e) {
        fail("realization.gap_rule", e.what());
      }
    }
    if (r.contains("eta")) c.eta = get_real(r, "eta", "realization.eta");
    if (r.contains("intervals")) {
      const Json& list = r["intervals"];
      if (!list.is_array()) fail("realization.intervals", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = fmt::format("realization.intervals[{}]", i);
        check_keys(list[i], {"word", "left", "right"}, where);
        ExplicitInterval iv;
        try {
          iv.word = Word::parse(get<std::string>(list[i], "word", where + ".word"));
        } catch (const InvalidArgument& e) {
          fail(where + ".word", e.what());
        }
        iv.left = get_real(list[i], "left", where + ".left");
        iv.right = get_real(list[i], "right", where + ".right");
        c.intervals.push_back(std::move(iv));
      }
    }
    if (c.gap_rule == GapRule::explicit_map && c.intervals.empty()) {
      fail("realization.intervals", "required for the explicit gap rule");
    }
    if (c.gap_rule != GapRule::explicit_map && !c.intervals.empty()) {
      fail("realization.intervals", "only valid with gap_rule \"explicit\"");
    }
    if (c.gap_rule == GapRule::uniformly_perfect && !(c.eta > 0.0 && c.eta < 1.0)) {
      fail("realization.eta", "uniformly_perfect needs 0 < eta < 1");
    }
  }

  if (c.gap_rule == GapRule::uniformly_perfect) {
    c.spec = spec_to_json(uniformly_perfect_spec(c.eta));
  } else {
    if (!doc.contains("spec")) fail("spec", "missing");
    const Json& s = doc["spec"];
    Json inline_spec = s.is_string() ? read_json_file(base_dir / s.get<std::string>(), "spec") : s;
    try {
      c.spec = spec_to_json(spec_from_json(inline_spec));
    } catch (const InvalidArgument& e) {
      fail("spec", e.what());
    }
  }
  if (doc.contains("measure")) {
    try {
      const auto rule = weight_rule_from_json(doc["measure"]);
      make_weighted_measure(spec_from_json(c.spec), rule);
      c.weight_rule = weight_rule_to_json(rule);
    } catch (const InvalidArgument& e) {
      fail("measure", e.what());
    }
  }

  if (doc.contains("depth")) c.depth = get_count(doc, "depth", "depth");
  if (c.depth < 1) fail("depth", "must be at least 1");
  if (doc.contains("tail_window")) {
    c.tail_window = get_count(doc, "tail_window", "tail_window");
  } else {
    c.tail_window = std::min(kDefaultTailWindow, c.depth);
  }
  if (c.tail_window < 1) fail("tail_window", "must be at least 1");
  if (c.tail_window > c.depth) fail("tail_window", fmt::format("{} exceeds depth {}", c.tail_window, c.depth));
  if (doc.contains("tolerance")) c.tolerance = get_real(doc, "tolerance", "tolerance");
  if (!(c.tolerance > 0.0 && c.tolerance < 1.0)) fail("tolerance", "must lie in (0, 1)");

  if (doc.contains("scales")) {
    const Json& s = doc["scales"];
    check_keys(s, {"base", "largest", "count"}, "scales");
    if (s.contains("base")) c.scale_base = get_real(s, "base", "scales.base");
    if (s.contains("largest")) c.scale_largest = get_real(s, "largest", "scales.largest");
    if (s.contains("count")) c.scale_count = get_count(s, "count", "scales.count");
  }
  if (!(c.scale_base > 0.0 && c.scale_base < 1.0)) fail("scales.base", "must lie in (0, 1)");
  if (c.scale_largest == 0.0) c.scale_largest = std::pow(c.scale_base, 4);
  if (!(c.scale_largest > 0.0)) fail("scales.largest", "must be positive");
  if (c.scale_count == 0) c.scale_count = std::max<std::size_t>(4, c.depth > 5 ? c.depth - 5 : 0);
  if (c.command == Command::estimate && c.estimator == Estimator::box && c.scale_count < 4) {
    fail("scales.count", "box counting needs at least 4 scales");
  }

  if (doc.contains("seed")) {
    const Json& s = doc["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      fail("seed", "expected an unsigned integer");
    }
    c.seed = s.get<std::uint64_t>();
  }

  if (doc.contains("q") && doc.contains("q_grid")) fail("q", "give either q or q_grid");
  if (doc.contains("q")) {
    const double q = get_real(doc, "q", "q");
    check_q(q, "q");
    c.q_grid = {q};
  } else if (doc.contains("q_grid")) {
    const Json& g = doc["q_grid"];
    if (!g.is_array() || g.empty()) fail("q_grid", "expected a non-empty array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::string where = fmt::format("q_grid[{}]", i);
      if (!g[i].is_number()) fail(where, "expected a number");
      const double q = g[i].get<double>();
      check_q(q, where);
      c.q_grid.push_back(q);
    }
  } else {
    c.q_grid = default_q_grid();
  }

  if (doc.contains("path")) {
    try {
      c.path = Word::parse(get<std::string>(doc, "path", "path"));
    } catch (const InvalidArgument& e) {
      fail("path", e.what());
    }
  }
  if (doc.contains("x")) c.x = get_real(doc, "x", "x");
  if (doc.contains("path_sample")) c.path_sample = get_count(doc, "path_sample", "path_sample");
  if (c.path_sample < 1) fail("path_sample", "must be at least 1");

  if (doc.contains("sq")) {
    const Json& s = doc["sq"];
    check_keys(s, {"q", "delta", "region"}, "sq");
    if (s.contains("q")) c.sq_q = get_real(s, "q", "sq.q");
    if (s.contains("delta")) c.delta = get_real(s, "delta", "sq.delta");
    if (s.contains("region")) {
      const Json& r = s["region"];
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        fail("sq.region", "expected [left, right]");
      }
      c.region = std::make_pair(r[0].get<double>(), r[1].get<double>());
      if (!(c.region->first <= c.region->second)) fail("sq.region", "left exceeds right");
    }
  }
  if (!(c.sq_q >= 0.0)) fail("sq.q", "must be >= 0");
  if (c.command == Command::estimate && c.estimator == Estimator::sq && !(c.delta > 0.0)) {
    fail("sq.delta", "a positive delta is required");
  }

  if (doc.contains("output")) {
    const Json& o = doc["output"];
    check_keys(o, {"path", "format"}, "output");
    if (o.contains("path")) c.output_path = get<std::string>(o, "path", "output.path");
    if (o.contains("format")) c.format = format_from_string(get<std::string>(o, "format", "output.format"));
  }
  return c;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail("<text>", fmt::format("not valid JSON: {}", e.what()));
  }
  return parse_config(doc, base_dir);
}

Json config_to_json(const RunConfig& c) {
  Json doc;
  doc["schema"] = kSchemaVersion;
  doc["command"] = to_string(c.command);
  if (c.estimator) doc["estimator"] = to_string(*c.estimator);
  doc["spec"] = c.spec;
  if (c.weight_rule) doc["measure"] = *c.weight_rule;
  doc["depth"] = c.depth;
  doc["tail_window"] = c.tail_window;
  doc["tolerance"] = c.tolerance;
  doc["scales"] = Json{{"base", c.scale_base}, {"largest", c.scale_largest}, {"count", c.scale_count}};
  doc["seed"] = c.seed;
  doc["q_grid"] = c.q_grid;
  if (c.path) doc["path"] = c.path->to_string();
  if (c.x) doc["x"] = *c.x;
  doc["path_sample"] = c.path_sample;
  Json realization{{"gap_rule", to_string(c.gap_rule)}};
  if (c.gap_rule == GapRule::uniformly_perfect) realization["eta"] = c.eta;
  if (!c.intervals.empty()) {
    Json list = Json::array();
    for (const auto& iv : c.intervals) {
      list.push_back(Json{{"word", iv.word.to_string()}, {"left", iv.left}, {"right", iv.right}});
    }
    realization["intervals"] = list;
  }
  doc["realization"] = realization;
  Json sq{{"q", c.sq_q}, {"delta", c.delta}};
  if (c.region) sq["region"] = Json::array({c.region->first, c.region->second});
  doc["sq"] = sq;
  doc["output"] = Json{{"path", c.output_path}, {"format", to_string(c.format)}};
  return doc;
}

std::string config_help() {
  return fmt::format(
      "Config file (JSON, strict: unknown keys are errors)\n"
      "  schema        {}\n"
      "  command       dim | local-dim | lq | realize | estimate | verify | conditions\n"
      "  estimator     box | local | sq (estimate only; also the positional argument)\n"
      "  spec          construction object, or a path to a JSON file holding one\n"
      "  measure       weight rule: {{\"name\": \"uniform\"}}, {{\"name\": \"bernoulli\", \"weights\": [...]}},\n"
      "                {{\"name\": \"level_weights\", \"levels\": [[...]], \"cycle\": true}}; default uniform\n"
      "  depth         levels to evaluate (default {})\n"
      "  tail_window   liminf/limsup window (default {}, capped at depth when omitted)\n"
      "  tolerance     level-equation solver tolerance (default {})\n"
      "  scales        {{\"base\": {:.6g}, \"largest\": base^4, \"count\": max(4, depth - 5)}}\n"
      "  seed          path and point sampling seed (default 0)\n"
      "  q, q_grid     L^q exponents, q >= 0 and q != 1 (default grid 0.5 0.9 0.99 1.01 1.1 2)\n"
      "  path          word such as \"1.2.2\" for local-dim (default: sampled from the measure)\n"
      "  x             point for the local estimator (default: a sampled point)\n"
      "  path_sample   sampled paths for conditions (default {})\n"
      "  realization   {{\"gap_rule\": uniform_gaps | left_packed | edge_anchored | uniformly_perfect | explicit,\n"
      "                 \"eta\": (uniformly_perfect), \"intervals\": [{{\"word\", \"left\", \"right\"}}] (explicit)}}\n"
      "  sq            {{\"q\": 2, \"delta\": > 0, \"region\": [left, right]}}\n"
      "  output        {{\"path\": file (default stdout), \"format\": json | csv}}\n",
      kSchemaVersion, kDefaultDepth, kDefaultTailWindow, kDefaultTolerance, kDefaultScaleBase, kDefaultPathSample);
}

}  // namespace moran::cli
