#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <string>

#include <moran/error.hpp>
#include <moran/serialize.hpp>

#include "moran_cli/config.hpp"
#include "moran_cli/run.hpp"

using namespace moran;
using namespace moran::cli;

namespace {

const std::filesystem::path kData = MORAN_TEST_DATA_DIR;

Json thirds_config(const std::string& command) {
  return Json{{"schema", 1},
              {"command", command},
              {"spec", {{"kind", "homogeneous"}, {"levels", {{{"N", 2}, {"ratios", {1.0 / 3, 1.0 / 3}}}}}}}};
}

Json run_json(const Json& doc) {
  const auto outcome = run(parse_config(doc));
  REQUIRE(outcome.exit_code == kSuccess);
  return Json::parse(outcome.output);
}

}  // namespace

TEST_CASE("defaults") {
  const auto c = parse_config(thirds_config("dim"));
  CHECK(c.depth == kDefaultDepth);
  CHECK(c.tail_window == kDefaultTailWindow);
  CHECK(c.tolerance == kDefaultTolerance);
  CHECK(c.format == Format::json);
  CHECK(c.output_path.empty());
  CHECK_FALSE(c.weight_rule);

  auto shallow = thirds_config("dim");
  shallow["depth"] = 4;
  CHECK(parse_config(shallow).tail_window == 4);
}

TEST_CASE("strict parsing names the offending key") {
  const auto expect_error = [](Json doc, const std::string& key) {
    try {
      parse_config(doc);
      FAIL("accepted ", doc.dump());
    } catch (const InvalidArgument& e) {
      CHECK(std::string(e.what()).find(key) != std::string::npos);
    }
  };
  auto doc = thirds_config("dim");
  doc["depht"] = 3;
  expect_error(doc, "depht");

  doc = thirds_config("dim");
  doc["depth"] = 5;
  doc["tail_window"] = 6;
  expect_error(doc, "tail_window");

  doc = thirds_config("lq");
  doc["q"] = 1.0;
  expect_error(doc, "q");

  doc = thirds_config("lq");
  doc["q_grid"] = {0.5, -1.0};
  expect_error(doc, "q_grid");

  expect_error(thirds_config("estimate"), "estimator");
  expect_error(thirds_config("fly"), "command");

  doc = thirds_config("dim");
  doc["schema"] = 2;
  expect_error(doc, "schema");

  doc = thirds_config("dim");
  doc["output"] = {{"format", "xml"}};
  expect_error(doc, "output");

  doc = thirds_config("dim");
  doc["spec"]["levels"][0]["ratios"] = {0.7, 0.7};
  CHECK_NOTHROW(parse_config(doc));  // overlapping ratios are legal for dim
  doc["spec"]["levels"][0]["ratios"] = {1.5, 0.2};
  expect_error(doc, "spec");
}

TEST_CASE("spec file references resolve against the config directory") {
  const auto c = parse_config(Json{{"command", "dim"}, {"spec", "middle_thirds_spec.json"}}, kData);
  CHECK(c.spec["kind"] == "homogeneous");
  CHECK_THROWS_AS(parse_config(Json{{"command", "dim"}, {"spec", "missing.json"}}, kData), InvalidArgument);
}

TEST_CASE("config echo round-trips") {
  auto doc = thirds_config("estimate");
  doc["estimator"] = "sq";
  doc["sq"] = {{"q", 3.0}, {"delta", 0.01}, {"region", {0.0, 0.5}}};
  doc["measure"] = {{"name", "bernoulli"}, {"weights", {0.25, 0.75}}};
  doc["seed"] = 12;
  doc["realization"] = {{"gap_rule", "edge_anchored"}};
  const auto c = parse_config(doc);
  const auto echo = config_to_json(c);
  CHECK(config_to_json(parse_config(echo)) == echo);
  CHECK(c.sq_q == 3.0);
  CHECK(c.region == std::pair{0.0, 0.5});
  CHECK(c.gap_rule == GapRule::edge_anchored);
}

TEST_CASE("dim reports the middle-thirds dimension") {
  auto doc = thirds_config("dim");
  doc["depth"] = 100;
  doc["tail_window"] = 20;
  const auto out = run_json(doc);
  CHECK(out["command"] == "dim");
  CHECK(out["config"]["depth"] == 100);
  const double s = out["result"]["s_star"].get<double>();
  CHECK(s == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-10));
}

TEST_CASE("csv output carries the config line") {
  auto doc = thirds_config("dim");
  doc["depth"] = 5;
  doc["output"] = {{"format", "csv"}};
  const auto outcome = run(parse_config(doc));
  REQUIRE(outcome.exit_code == kSuccess);
  CHECK(outcome.output.rfind("# config: {", 0) == 0);
  CHECK(outcome.output.find("\nn,s_n,residual\n") != std::string::npos);
}

TEST_CASE("estimators through the runner") {
  auto doc = thirds_config("estimate");
  doc["estimator"] = "box";
  doc["depth"] = 10;
  doc["realization"] = {{"gap_rule", "edge_anchored"}};
  const auto box = run_json(doc);
  CHECK(box["result"]["slope"].get<double>() == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(2e-2));

  doc["estimator"] = "sq";
  CHECK_THROWS_AS(parse_config(doc), InvalidArgument);  // delta missing
  doc["sq"] = {{"delta", 0.01}};
  CHECK(run_json(doc)["result"]["cardinality"].get<std::size_t>() > 0);
}

TEST_CASE("exit codes") {
  const auto overlap = parse_config(Json::parse(R"({
    "command": "verify", "depth": 1,
    "spec": {"kind": "homogeneous", "levels": [{"N": 2, "ratios": [0.5, 0.5]}]},
    "realization": {"gap_rule": "explicit", "intervals": [
      {"word": "-", "left": 0, "right": 1}, {"word": "1", "left": 0, "right": 0.5},
      {"word": "2", "left": 0.4, "right": 0.9}]}})"));
  const auto outcome = run(overlap);
  CHECK(outcome.exit_code == kAxiomFailure);
  CHECK_FALSE(outcome.output.empty());

  auto good = thirds_config("verify");
  good["depth"] = 10;
  good["tail_window"] = 2;
  good["realization"] = {{"gap_rule", "edge_anchored"}};
  CHECK(run(parse_config(good)).exit_code == kSuccess);

  CHECK(exit_code_for(AxiomViolation("x")) == kAxiomFailure);
  CHECK(exit_code_for(NonConvergence("x")) == kNonConvergence);
  CHECK(exit_code_for(InvalidArgument("x")) == kConfigError);
}

TEST_CASE("lq with a grid around 1 includes the sandwich") {
  auto doc = thirds_config("lq");
  doc["depth"] = 64;
  doc["q_grid"] = {0.5, 2.0};
  doc["measure"] = {{"name", "bernoulli"}, {"weights", {0.3, 0.7}}};
  const auto out = run_json(doc);
  CHECK(out["result"]["dimensions"].size() == 2);
  CHECK(out["result"].contains("sandwich"));
}
