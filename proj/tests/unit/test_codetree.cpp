#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <moran/codetree.hpp>
#include <moran/construction.hpp>
#include <moran/error.hpp>
#include <moran/word.hpp>

#include "generators.hpp"
#include "oracles.hpp"

using namespace moran;

namespace {

std::vector<Word> words_of_length(const ConstructionSpec& spec, std::size_t n) {
  std::vector<Word> out;
  for_each_word(spec, n, 1u << 20, [&](const Word& w) { out.push_back(w); });
  return out;
}

double product_of_ratios(const ConstructionSpec& spec, const Word& w) {
  double p = 1.0;
  for (std::size_t k = 1; k <= w.length(); ++k) p *= spec.ratio(k, w.at_level(k));
  return p;
}

}  // namespace

TEST_CASE("word text form round-trips") {
  CHECK(Word::parse("1.2.2") == Word{1, 2, 2});
  CHECK(Word{1, 2, 2}.to_string() == "1.2.2");
  CHECK(Word::parse("-").is_root());
  CHECK(Word{}.to_string() == "-");
  CHECK_THROWS_AS(Word::parse("1..2"), InvalidArgument);
  CHECK_THROWS_AS(Word::parse("0.1"), InvalidArgument);
  CHECK_THROWS_AS(Word{}.parent(), InvalidArgument);
  CHECK(common_prefix_length(Word{1, 2, 3}, Word{1, 2, 1}) == 2);
  CHECK(Word{1, 2}.is_prefix_of(Word{1, 2, 3}));
  CHECK_FALSE(Word{1, 3}.is_prefix_of(Word{1, 2, 3}));
}

TEST_CASE("offsprings are listed in index order") {
  const auto spec = gen::periodic_spec({{0.2, 0.3, 0.1}, {0.4, 0.4}});
  const auto kids = offsprings(spec, Word{2});
  REQUIRE(kids.size() == 2);
  CHECK(kids[0] == Word{2, 1});
  CHECK(kids[1] == Word{2, 2});
  CHECK(offsprings(spec, Word{}).size() == 3);
  CHECK_THROWS_AS(offsprings(spec, Word{4}), InvalidArgument);
  CHECK_THROWS_AS(offsprings(spec, Word{1, 3}), InvalidArgument);
}

TEST_CASE("invalid levels are rejected") {
  CHECK_THROWS_AS(constant_spec({1.0, 0.2}), InvalidArgument);
  CHECK_THROWS_AS(constant_spec({}), InvalidArgument);
  CHECK_THROWS_AS(constant_spec({0.2}, -1.0), InvalidArgument);
  // Rule-based specs are checked eagerly over their first levels.
  CHECK_THROWS_AS(make_spec([](std::size_t) { return 2u; },
                            [](std::size_t k, Word::Index) { return k == 3 ? 0.0 : 0.3; },
                            ConstructionKind::spatially_symmetric),
                  InvalidArgument);
  const auto late = make_spec([](std::size_t) { return 2u; },
                              [](std::size_t k, Word::Index) { return k == 500 ? 1.0 : 0.3; },
                              ConstructionKind::spatially_symmetric);
  CHECK_NOTHROW(late.level(499));
  CHECK_THROWS_AS(late.level(500), InvalidArgument);
  CHECK_THROWS_AS(make_spec([](std::size_t) { return 2u; },
                            [](std::size_t, Word::Index i) { return i == 1 ? 0.2 : 0.3; },
                            ConstructionKind::homogeneous),
                  InvalidArgument);
  const auto underflow = divergent_entropy_spec();
  CHECK(underflow.level(800).ratios[1] == 0.0);
  CHECK(underflow.log_ratios(800)[1] == -800.0);
  CHECK_THROWS_AS(middle_thirds_spec().level(0), InvalidArgument);
}

TEST_CASE("cylinder diameters are root diameter times the ratio product") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto levels = gen::ratio_levels(rng, 4, 3, false);
    const auto spec = gen::periodic_spec(levels);
    const auto w = gen::word(rng, spec, gen::index(rng, 0, 12));
    const double expected = std::log(product_of_ratios(spec, w));
    CHECK(cylinder_log_diameter(spec, w) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(log_ratio_product(spec, w) == doctest::Approx(expected).epsilon(1e-12));
  }
  const ConstructionSpec scaled({}, PeriodicTail{{uniform_level(2, 1.0 / 3)}}, ConstructionKind::homogeneous, 2.0);
  CHECK(cylinder_log_diameter(scaled, Word{1, 2}) == doctest::Approx(std::log(2.0 / 9)));
}

TEST_CASE("level sizes and word enumeration agree with brute force") {
  gen::Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto levels = gen::ratio_levels(rng, 3, 3, false);
    const auto spec = gen::periodic_spec(levels);
    const std::size_t n = gen::index(rng, 0, 6);
    std::vector<unsigned> branching;
    for (std::size_t k = 1; k <= n; ++k) branching.push_back(spec.branching(k));
    const auto expected = oracle::all_words(branching, n);
    const auto got = words_of_length(spec, n);
    REQUIRE(got.size() == expected.size());
    CHECK(level_size(spec, n) == expected.size());
    CHECK(std::exp(log_level_size(spec, n)) == doctest::Approx(static_cast<double>(expected.size())));
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(std::vector<unsigned>(got[i].indices().begin(), got[i].indices().end()) == expected[i]);
    }
  }
  CHECK_THROWS_AS(words_of_length(middle_thirds_spec(), 30), InvalidArgument);
}

TEST_CASE("symbolic distance is an ultrametric on words of equal length") {
  for (unsigned branches : {2u, 3u}) {
    std::vector<double> ratios;
    for (unsigned i = 1; i <= branches; ++i) ratios.push_back(0.1 + 0.07 * i);
    const auto spec = constant_spec(ratios);
    for (std::size_t n = 1; n <= 5; ++n) {
      const auto words = words_of_length(spec, n);
      gen::Rng rng(n * 31 + branches);
      const std::size_t samples = std::min<std::size_t>(4000, words.size() * words.size() * words.size());
      for (std::size_t t = 0; t < samples; ++t) {
        const auto& a = words[gen::index(rng, 0, words.size() - 1)];
        const auto& b = words[gen::index(rng, 0, words.size() - 1)];
        const auto& c = words[gen::index(rng, 0, words.size() - 1)];
        const double ab = rho_distance(spec, a, b);
        CHECK(ab == rho_distance(spec, b, a));
        CHECK(ab <= std::max(rho_distance(spec, a, c), rho_distance(spec, c, b)));
        CHECK((ab == 0.0) == (a == b));
      }
    }
  }
}

TEST_CASE("symbolic diameter of a cylinder is its ratio product") {
  const auto spec = constant_spec({0.3, 0.25, 0.2});
  for (std::size_t n = 0; n <= 3; ++n) {
    for (const auto& i : words_of_length(spec, n)) {
      double widest = 0.0;
      const auto extensions = words_of_length(spec, 5 - n);
      for (const auto& x : extensions) {
        for (const auto& y : extensions) widest = std::max(widest, rho_distance(spec, i.concat(x), i.concat(y)));
      }
      CHECK(widest == doctest::Approx(product_of_ratios(spec, i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("perturbed diameters stay within the jitter envelope") {
  const ConstructionSpec spec({}, PeriodicTail{{Level{2, {0.3, 0.4}}}}, ConstructionKind::spatially_symmetric, 1.0,
                              JitterPerturbation{0.05, 9});
  CHECK(spec.word_dependent());
  gen::Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto w = gen::word(rng, spec, gen::index(rng, 1, 20));
    const double gap = cylinder_log_diameter(spec, w) - symmetric_log_diameter(spec, w);
    CHECK(std::abs(gap) <= 0.05 * static_cast<double>(w.length()) + 1e-12);
  }
  CHECK_THROWS_AS(ConstructionSpec({}, PeriodicTail{{Level{1, {0.9}}}}, ConstructionKind::homogeneous, 1.0,
                                   JitterPerturbation{0.2, 1}),
                  InvalidArgument);
}
