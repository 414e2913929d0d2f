#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <moran/construction.hpp>
#include <moran/dimension.hpp>
#include <moran/error.hpp>
#include <moran/measure.hpp>
#include <moran/realization.hpp>
#include <moran/serialize.hpp>

#include "generators.hpp"

using namespace moran;

namespace {

/// Serialize, print, parse and deserialize.
ConstructionSpec through_text(const ConstructionSpec& spec) {
  return spec_from_json(Json::parse(spec_to_json(spec).dump()));
}

}  // namespace

TEST_CASE("specs round-trip through JSON text") {
  gen::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto spec = gen::periodic_spec(gen::ratio_levels(rng, gen::index(rng, 1, 4), 3, false));
    const auto back = through_text(spec);
    CHECK(same_construction(spec, back, 12));
    CHECK(spec_to_json(back) == spec_to_json(spec));
  }
  const auto blocks = doubling_block_spec(uniform_level(2, 0.5), uniform_level(1, 0.5));
  CHECK(same_construction(blocks, through_text(blocks), 200));
  const ConstructionSpec log_linear({uniform_level(2, 0.3)}, LogLinearTail{{1.0, 0.5}, {0.0, 0.25}},
                                    ConstructionKind::spatially_symmetric, 2.5, JitterPerturbation{0.01, 3});
  const auto back = through_text(log_linear);
  CHECK(same_construction(log_linear, back, 100));
  CHECK(back.root_diameter() == 2.5);
  CHECK(back.perturbation() == log_linear.perturbation());
  CHECK_THROWS_AS(spec_to_json(make_spec([](std::size_t) { return 1u; }, [](std::size_t, Word::Index) { return 0.5; },
                                          ConstructionKind::homogeneous)),
                  InvalidArgument);
  const auto divergent = divergent_entropy_spec();
  CHECK(same_construction(divergent, through_text(divergent), 50));
}

TEST_CASE("spec documents are parsed strictly") {
  const auto minimal = spec_from_json(Json::parse(R"({"kind": "homogeneous", "levels": [{"N": 2, "ratios": [0.25, 0.25]}]})"));
  CHECK(minimal.level(7) == uniform_level(2, 0.25));
  CHECK(minimal.root_diameter() == 1.0);

  const char* bad[] = {
      R"({"kind": "homogeneous", "levels": [{"N": 2, "ratios": [0.25, 0.25]}], "depht": 3})",
      R"({"kind": "round", "levels": [{"N": 1, "ratios": [0.5]}]})",
      R"({"kind": "homogeneous"})",
      R"({"kind": "homogeneous", "levels": [{"N": 2, "ratios": [0.25]}]})",
      R"({"kind": "homogeneous", "levels": [{"N": 2, "ratios": [0.25, 0.3]}]})",
      R"({"kind": "homogeneous", "levels": "none"})",
      R"({"kind": "homogeneous", "tail": {"rule": "spiral"}})",
      R"({"kind": "homogeneous", "levels": [{"N": 1, "ratios": ["half"]}]})",
      R"([1, 2])",
  };
  for (const char* text : bad) {
    CAPTURE(text);
    CHECK_THROWS_AS(spec_from_json(Json::parse(text)), InvalidArgument);
  }
}

TEST_CASE("weight rules and measures round-trip") {
  const auto spec = middle_thirds_spec();
  const auto bernoulli = make_weighted_measure(spec, bernoulli_weights({0.3, 0.7}), 2.0);
  const auto doc = measure_to_json(bernoulli);
  CHECK(doc["weight_rule"]["name"] == "bernoulli");
  const auto back = measure_from_json(Json::parse(doc.dump()));
  CHECK(back.root_mass() == 2.0);
  CHECK(back.level_weights(5) == std::vector<double>{0.3, 0.7});

  const LevelWeights levels{{{0.5, 0.5}, {0.1, 0.9}}, false};
  const auto rule = weight_rule_from_json(weight_rule_to_json(levels));
  const auto& lw = std::get<LevelWeights>(rule);
  CHECK(lw.levels == levels.levels);
  CHECK_FALSE(lw.cycle);
  CHECK(std::holds_alternative<UniformWeights>(weight_rule_from_json(Json{{"name", "uniform"}})));
  CHECK_THROWS_AS(weight_rule_from_json(Json{{"name", "zipf"}}), InvalidArgument);
  CHECK_THROWS_AS(weight_rule_from_json(Json{{"name", "uniform"}, {"weights", {0.5}}}), InvalidArgument);
  CHECK_THROWS_AS(weight_rule_to_json(CustomWeights{[](const Word&, Word::Index) { return 0.5; }}), InvalidArgument);
}

TEST_CASE("reports serialize non-finite values as null") {
  DimensionReport report;
  report.s_sequence = {0.5, std::numeric_limits<double>::quiet_NaN()};
  report.residuals = {0.0, 0.0};
  report.oscillation_last = std::numeric_limits<double>::infinity();
  const auto doc = to_json(report);
  CHECK(doc["s_sequence"][0] == 0.5);
  CHECK(doc["s_sequence"][1].is_null());
  CHECK(doc["oscillation_last"].is_null());
  CHECK_NOTHROW(Json::parse(doc.dump()));
}

TEST_CASE("csv tables") {
  const auto report = dimension_report(middle_thirds_spec(), 5, 2);
  const auto csv = dimension_report_csv(report);
  CHECK(csv.rfind("n,s_n,residual\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  CHECK(csv.find("\n1,0.630929753571") != std::string::npos);
}
