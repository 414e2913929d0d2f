#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <moran/codetree.hpp>
#include <moran/construction.hpp>
#include <moran/cylinder_classes.hpp>
#include <moran/dimension.hpp>
#include <moran/error.hpp>
#include <moran/filtration.hpp>
#include <moran/measure.hpp>

#include "generators.hpp"

using namespace moran;

namespace {

/// Words j with diam(E_j) <= t < diam(E_{j^-}), found by plain recursion on
/// ratio products.
void crossing_words(const std::vector<std::vector<double>>& cycle, double t, std::vector<Word>& out, Word& w,
                    double diam) {
  if (diam <= t) {
    out.push_back(w);
    return;
  }
  const auto& level = cycle[w.length() % cycle.size()];
  for (std::size_t i = 0; i < level.size(); ++i) {
    w.push_back(static_cast<Word::Index>(i + 1));
    crossing_words(cycle, t, out, w, diam * level[i]);
    w.pop_back();
  }
}

std::vector<Word> crossing_words(const std::vector<std::vector<double>>& cycle, double t) {
  std::vector<Word> out;
  Word w;
  crossing_words(cycle, t, out, w, 1.0);
  return out;
}

}  // namespace

TEST_CASE("middle-thirds filtration in closed form") {
  const auto f = build_symbolic_filtration(middle_thirds_spec(), 30);
  REQUIRE(f.depth() == 30);
  for (std::size_t n = 1; n <= 30; ++n) {
    const double nn = static_cast<double>(n);
    CHECK(f.log_gamma(n) == doctest::Approx(-nn * std::log(3.0)));
    // M5 allows k = n + 1 at level n, so δ_n = γ_n^{(n+1)/n} / 2.
    CHECK(f.exponents()[n - 1] == n + 1);
    CHECK(f.log_delta(n) == doctest::Approx(std::log(0.5) - (nn + 1) * std::log(3.0)));
    CHECK(f.log_member_count(n) == doctest::Approx(nn * std::log(2.0)));
  }
  REQUIRE(f.thresholds().size() == 30);
  for (std::size_t k = 2; k <= 31; ++k) CHECK(f.thresholds()[k - 2] == k - 1);

  const auto report = verify_filtration_axioms(f, 10);
  CHECK(report.f1);
  CHECK(report.f2);
  CHECK(report.f3.pass);
  CHECK(report.f4.pass);
  CHECK(report.all_pass());
  CHECK_THROWS_AS(verify_filtration_axioms(f, 16), InvalidArgument);
}

TEST_CASE("threshold members match brute-force crossing words") {
  gen::Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    const auto levels = gen::ratio_levels(rng, gen::index(rng, 1, 3), 3, true);
    const auto spec = gen::periodic_spec(levels);
    const auto f = build_symbolic_filtration(spec, 6);
    for (std::size_t n = 1; n <= 6; ++n) {
      const auto expected = crossing_words(levels, std::exp(f.log_threshold(n)));
      const auto members = f.members(n);
      CHECK(members == expected);
      CHECK(is_antichain(members));
      CHECK(is_symbolic_cover(spec, members));
      CHECK(f.log_member_count(n) == doctest::Approx(std::log(static_cast<double>(expected.size()))));
      for (const auto& w : members) CHECK(f.is_member(n, w));
      const auto path = gen::word(rng, spec, 2000);
      const auto q = f.member_containing(n, path);
      CHECK(q.is_prefix_of(path));
      CHECK(f.is_member(n, q));
    }
  }
}

TEST_CASE("cylinder classes reproduce brute-force moments") {
  gen::Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    const auto levels = gen::ratio_levels(rng, gen::index(rng, 1, 3), 3, true);
    const auto spec = gen::periodic_spec(levels);
    std::vector<double> weights(spec.branching(1));
    double total = 0.0;
    for (auto& w : weights) total += (w = gen::uniform(rng, 0.1, 1.0));
    for (auto& w : weights) w /= total;
    std::vector<std::vector<double>> per_level{weights};
    for (std::size_t k = 1; k < levels.size(); ++k) {
      per_level.push_back(std::vector<double>(levels[k].size(), 1.0 / static_cast<double>(levels[k].size())));
    }
    const auto measure = make_weighted_measure(spec, LevelWeights{per_level, true});
    AntichainRefiner refiner(spec, &measure, Word{});
    double t = 0.0;
    for (int step = 0; step < 5; ++step) {
      t -= gen::uniform(rng, 0.2, 1.5);
      refiner.refine(t);
      const auto words = crossing_words(levels, std::exp(t));
      for (double q : {0.0, 0.5, 2.0, 3.5}) {
        double moment = 0.0;
        for (const auto& w : words) moment += std::exp(q * cylinder_log_mass(measure, w));
        CHECK(refiner.log_moment(q) == doctest::Approx(std::log(moment)).epsilon(1e-10));
      }
      CHECK(refiner.log_count() == doctest::Approx(std::log(static_cast<double>(words.size()))).epsilon(1e-12));
    }
    CHECK_THROWS_AS(refiner.refine(t + 1.0), InvalidArgument);
  }
}

TEST_CASE("word-dependent diameters are refined word by word") {
  const ConstructionSpec spec({}, PeriodicTail{{Level{2, {0.3, 0.45}}}}, ConstructionKind::spatially_symmetric, 1.0,
                              JitterPerturbation{0.1, 2});
  AntichainRefiner refiner(spec, nullptr, Word{});
  CHECK_FALSE(refiner.merging());
  const auto f = build_symbolic_filtration(spec, 8);
  refiner.refine(f.log_threshold(8));
  const auto members = f.members(8);
  CHECK(refiner.classes().size() == members.size());
  CHECK(is_antichain(members));
  CHECK(is_symbolic_cover(spec, members));
}

TEST_CASE("local dimension through the filtration on middle thirds") {
  const auto f = build_symbolic_filtration(middle_thirds_spec(), 200);
  const auto measure = make_uniform_measure(middle_thirds_spec());
  PathSampler sampler(measure, 5);
  const auto est = local_dim_via_filtration(measure, f, sampler.sample(200));
  for (std::size_t n = 1; n <= 200; ++n) {
    const double nn = static_cast<double>(n);
    CHECK(est.ratios[n - 1] == doctest::Approx(nn * std::log(2.0) / (std::log(2.0) + (nn + 1) * std::log(3.0))));
  }
  CHECK(est.upper <= std::log(2.0) / std::log(3.0));
  CHECK(est.lower == doctest::Approx(est.ratios[160]));

  const auto atom = make_weighted_measure(middle_thirds_spec(), bernoulli_weights({0.0, 1.0}));
  CHECK_THROWS_AS(local_dim_via_filtration(atom, f, Word(std::vector<Word::Index>(200, 2))), InvalidArgument);
  CHECK_THROWS_AS(local_dim_via_filtration(make_uniform_measure(constant_spec({0.2, 0.2})), f,
                                           Word(std::vector<Word::Index>(200, 1))),
                  InvalidArgument);
}

TEST_CASE("hand-built filtrations") {
  const auto spec = middle_thirds_spec();
  const std::vector<std::vector<Word>> levels{{Word{1}, Word{2}}, {Word{1, 1}, Word{1, 2}, Word{2}},
                                              {Word{1, 1}, Word{1, 2}, Word{2, 1}, Word{2, 2}},
                                              {Word{1}, Word{1, 1}, Word{2}}};
  const auto good = hand_built_filtration({0.3, 0.2, 0.1, 0.05}, {0.1, 0.05, 0.02, 0.01}, levels, 0.5, spec);
  CHECK(good.member_containing(2, Word{2, 1, 1}) == Word{2});
  CHECK(good.log_member_count(3) == doctest::Approx(std::log(4.0)));
  const auto report = verify_filtration_axioms(good, 2);
  CHECK(report.f1);
  CHECK(report.f2);
  CHECK_FALSE(report.disjoint);

  const auto inverted = hand_built_filtration({0.3, 0.2, 0.1, 0.05}, {0.1, 0.5, 0.02, 0.01}, levels, 0.5, spec);
  const auto bad = verify_filtration_axioms(inverted, 2);
  CHECK_FALSE(bad.f1);
  CHECK(bad.f1_first_violation == 2);
  CHECK(bad.hard_failure());
  CHECK_THROWS_AS(hand_built_filtration({0.3}, {0.1, 0.2}, {{Word{1}}}, 0.5), InvalidArgument);
  CHECK_THROWS_AS(hand_built_filtration({0.3}, {0.1}, {{Word{3}}}, 0.5, spec), InvalidArgument);
}

TEST_CASE("summary csv lists one row per level") {
  const auto f = build_symbolic_filtration(middle_thirds_spec(), 5);
  const auto csv = filtration_summary_csv(f);
  CHECK(csv.rfind("n,gamma_n,delta_n,level_size,F3_ratio,F4_ratio\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}
