// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Tolerances and sizes are fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include <moran/codetree.hpp>
#include <moran/construction.hpp>
#include <moran/dimension.hpp>
#include <moran/entropy.hpp>
#include <moran/error.hpp>
#include <moran/filtration.hpp>
#include <moran/lq_spectrum.hpp>
#include <moran/measure.hpp>
#include <moran/realization.hpp>
#include <moran/serialize.hpp>

#include "generators.hpp"
#include "moran_cli/config.hpp"
#include "moran_cli/run.hpp"
#include "oracles.hpp"

using namespace moran;

namespace {

constexpr double kClosedFormTol = 1e-10;
constexpr double kClosedFormSeconds = 1.0;
constexpr double kTwoRatioTol = 1e-9;
constexpr double kDoublingGap = 0.2;
constexpr double kDoublingTol = 1e-6;
constexpr double kDoublingSeconds = 10.0;
constexpr double kEntropyTol = 1e-3;
constexpr double kIdentityTol = 1e-12;
constexpr double kLqTol = 1e-3;
constexpr double kTrendTol = 1e-2;
constexpr double kLocalDimTol = 2e-2;
constexpr double kBoxLow = 0.60;
constexpr double kBoxHigh = 0.66;
constexpr double kBoxResidual = 0.05;
constexpr double kBoxSeconds = 10.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Json thirds_spec_json() {
  return Json{{"kind", "homogeneous"}, {"levels", {{{"N", 2}, {"ratios", {1.0 / 3, 1.0 / 3}}}}}};
}

Verdict closed_form_dimension() {
  const auto start = std::chrono::steady_clock::now();
  const auto config = cli::parse_config(Json{{"command", "dim"}, {"depth", 100}, {"tail_window", 20},
                                              {"spec", thirds_spec_json()}});
  const auto outcome = cli::run(config);
  const double elapsed = seconds_since(start);
  if (outcome.exit_code != cli::kSuccess) return {false, outcome.message};
  const auto result = Json::parse(outcome.output)["result"];
  const double expected = std::log(2.0) / std::log(3.0);
  const double lo = result["s_star"].get<double>();
  const double hi = result["s_upper_star"].get<double>();
  const double err = std::max(std::abs(lo - expected), std::abs(hi - expected));
  return {err <= kClosedFormTol && elapsed < kClosedFormSeconds,
          fmt::format("s_* = {:.12f}, s^* = {:.12f}, max error {:.2e} (tol {:.0e}), {:.3f} s (limit {} s)", lo, hi,
                      err, kClosedFormTol, elapsed, kClosedFormSeconds)};
}

Verdict two_ratio_root() {
  const auto report = dimension_report(constant_spec({0.5, 0.25}), 100, 20);
  const double expected = oracle::two_ratio_dimension();
  double worst = 0.0;
  for (double s : report.s_sequence) worst = std::max(worst, std::abs(s - expected));
  return {worst <= kTwoRatioTol, fmt::format("max |s_n - {:.12f}| over n <= 100 is {:.2e} (tol {:.0e})", expected,
                                             worst, kTwoRatioTol)};
}

Verdict doubling_blocks() {
  const std::size_t depth = 4096, window = 2048;
  const auto start = std::chrono::steady_clock::now();
  const auto report = dimension_report(doubling_block_spec(uniform_level(2, 0.5), uniform_level(1, 0.5)), depth, window);
  const double elapsed = seconds_since(start);
  const auto ratios = oracle::doubling_block_ratios(depth);
  const double lo = oracle::tail_min(ratios, window);
  const double hi = oracle::tail_max(ratios, window);
  const double err = std::max(std::abs(report.s_star - lo), std::abs(report.s_upper_star - hi));
  const double gap = report.s_upper_star - report.s_star;
  return {gap > kDoublingGap && err <= kDoublingTol && elapsed < kDoublingSeconds,
          fmt::format("s_* = {:.8f}, s^* = {:.8f}, gap {:.4f} (> {}), oracle error {:.2e} (tol {:.0e}), {:.3f} s",
                      report.s_star, report.s_upper_star, gap, kDoublingGap, err, kDoublingTol, elapsed)};
}

Verdict entropy_averages() {
  const auto bernoulli = make_weighted_measure(middle_thirds_spec(), bernoulli_weights({0.3, 0.7}));
  PathSampler sampler(bernoulli, 1);
  const std::size_t N = 10000;
  const auto trace = entropy_average_ratio(bernoulli, sampler.sample(N), N);
  const double expected = oracle::bernoulli_entropy_ratio(0.3);
  const double bernoulli_err = std::abs(trace.ratio - expected);

  // Uniform measures: the ratio after n levels is Σ log N_k / Σ mean_i(-log c_{k,i}).
  double identity_err = 0.0;
  const std::vector<ConstructionSpec> specs{
      doubling_block_spec(uniform_level(2, 0.5), uniform_level(1, 0.5)),
      ConstructionSpec({}, PeriodicTail{{Level{3, {0.2, 0.3, 0.1}}, Level{2, {0.45, 0.15}}}},
                       ConstructionKind::spatially_symmetric),
      middle_thirds_spec()};
  for (const auto& spec : specs) {
    const auto measure = make_uniform_measure(spec);
    PathSampler path_sampler(measure, 2);
    const std::size_t n_max = 1000;
    const auto uniform = entropy_average_ratio(measure, path_sampler.sample(n_max), n_max);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 1; k <= n_max; ++k) {
      const auto level = spec.level(k);
      num += std::log(static_cast<double>(level.branching));
      double mean = 0.0;
      for (double c : level.ratios) mean -= std::log(c);
      den += mean / static_cast<double>(level.branching);
      const double got = uniform.numerator_partial[k - 1] / uniform.denominator_partial[k - 1];
      identity_err = std::max(identity_err, std::abs(got - num / den) / (num / den));
    }
  }
  return {bernoulli_err <= kEntropyTol && identity_err <= kIdentityTol,
          fmt::format("Bernoulli ratio {:.6f} vs {:.6f} (err {:.2e}, tol {:.0e}); uniform identity rel err {:.2e} "
                      "(tol {:.0e})",
                      trace.ratio, expected, bernoulli_err, kEntropyTol, identity_err, kIdentityTol)};
}

Verdict condition_detector() {
  const std::size_t n_max = 1000;
  const auto divergent = check_entropy_conditions(make_uniform_measure(divergent_entropy_spec()), n_max);
  const auto thirds = check_entropy_conditions(make_uniform_measure(middle_thirds_spec()), n_max);
  return {divergent.verdict == SeriesVerdict::diverging && thirds.verdict == SeriesVerdict::plausibly_convergent,
          fmt::format("divergent spec: {} (slope {:.3f}); middle thirds: {} (slope {:.3f})", to_string(divergent.verdict),
                      divergent.decay_slope, to_string(thirds.verdict), thirds.decay_slope)};
}

Verdict lq_dimensions_doubling() {
  const std::size_t depth = 2048;
  const auto measure = make_uniform_measure(doubling_block_spec(uniform_level(2, 0.5), uniform_level(1, 0.5)));
  const auto ratios = oracle::doubling_block_ratios(depth);
  const std::size_t window = depth / 5;
  const double s_lower = oracle::tail_min(ratios, window);
  const double s_upper = oracle::tail_max(ratios, window);
  const std::vector<double> qs{0.3, 0.5, 1.5, 2.0, 3.0};
  const auto dims = lq_dimensions(measure, qs, depth);
  double worst = 0.0;
  std::string values;
  for (const auto& d : dims) {
    const double target = d.q > 1.0 ? s_lower : s_upper;
    worst = std::max(worst, std::abs(d.dimension - target));
    values += fmt::format(" q={}:{:.6f}", d.q, d.dimension);
  }
  const auto grid = default_q_grid();
  const auto sandwich = dim_at_one_sandwich_check(measure, depth, grid, kLqTol);
  return {worst <= kLqTol && sandwich.sandwich_holds,
          fmt::format("oracle s_* = {:.6f}, s^* = {:.6f};{}; max err {:.2e} (tol {:.0e}); sandwich {} "
                      "(dim_{} = {:.6f} <= local <= dim_{} = {:.6f})",
                      s_lower, s_upper, values, worst, kLqTol, sandwich.sandwich_holds ? "holds" : "fails",
                      sandwich.q_above, sandwich.dim_above, sandwich.q_below, sandwich.dim_below)};
}

Verdict filtration_axioms() {
  const std::size_t depth = 60;
  const auto realization = realize_on_interval(constant_spec({0.5, 0.25}), GapRule::uniform_gaps, depth);
  const auto filtration = build_filtration(realization, depth);
  const auto report = verify_filtration_axioms(filtration, 20);
  const bool trends = report.f3.pass && report.f4.pass &&
                      std::abs(report.f3.extrapolated_deviation) < kTrendTol &&
                      std::abs(report.f4.extrapolated_deviation) < kTrendTol;

  const std::size_t local_depth = 1000;
  const auto thirds = middle_thirds_spec();
  const auto measure = make_uniform_measure(thirds);
  const auto symbolic = build_symbolic_filtration(thirds, local_depth);
  PathSampler sampler(measure, 3);
  const auto local = local_dim_via_filtration(measure, symbolic, sampler.sample(local_depth));
  const double expected = std::log(2.0) / std::log(3.0);
  const double local_err = std::max(std::abs(local.lower - expected), std::abs(local.upper - expected));
  return {report.f1 && report.f2 && trends && local_err <= kLocalDimTol,
          fmt::format("F1 {}, F2 {}, F3 extrapolated {:.2e}, F4 extrapolated {:.2e} (tol {:.0e}); local dim "
                      "[{:.5f}, {:.5f}] err {:.2e} (tol {:.0e})",
                      report.f1 ? "ok" : "fails", report.f2 ? "ok" : "fails", report.f3.extrapolated_deviation,
                      report.f4.extrapolated_deviation, kTrendTol, local.lower, local.upper, local_err, kLocalDimTol)};
}

Verdict uniformly_perfect() {
  const double eta = 0.5;
  const std::size_t depth = 20;
  const double c = 1.0 / 12.0;
  const auto realization = uniformly_perfect_example(eta, depth);
  const auto axioms = verify_moran_axioms(realization, depth, 5);

  // Diameter bounds over every word, walking the placement rule directly.
  std::size_t violations = 0, checked = 0;
  Word word;
  const std::function<void(const Interval&)> walk = [&](const Interval& iv) {
    const double n = static_cast<double>(word.length());
    const double diam = static_cast<double>(iv.right - iv.left);
    const double cn = std::pow(c, n);
    ++checked;
    if (!(diam >= cn * (1 - 1e-12) && diam <= 2.0 / eta * cn * (1 + 1e-12))) ++violations;
    if (word.length() == depth) return;
    const auto kids = realization.children(word, iv);
    for (std::size_t i = 0; i < kids.size(); ++i) {
      word.push_back(static_cast<Word::Index>(i + 1));
      walk(kids[i]);
      word.pop_back();
    }
  };
  walk(realization.interval(Word{}));
  return {axioms.all_pass() && violations == 0,
          fmt::format("M1 {} M2 {} M3 {} M4 {} M5 {} (exact to depth {}); diameter bounds violated on {} of {} words",
                      axioms.m1, axioms.m2, axioms.m3, axioms.m4, axioms.m5, axioms.exact_depth, violations, checked)};
}

Verdict box_counting() {
  const auto start = std::chrono::steady_clock::now();
  auto doc = Json{{"command", "estimate"}, {"estimator", "box"}, {"depth", 12}, {"spec", thirds_spec_json()},
                  {"output", {{"format", "csv"}}}};
  const auto outcome = cli::run(cli::parse_config(doc));
  doc["output"]["format"] = "json";
  const auto json = cli::run(cli::parse_config(doc));
  const double elapsed = seconds_since(start);
  if (outcome.exit_code != cli::kSuccess || json.exit_code != cli::kSuccess) return {false, outcome.message};
  const auto result = Json::parse(json.output)["result"];
  const double slope = result["slope"].get<double>();
  const double residual = result["residual"].get<double>();
  const bool has_rows = outcome.output.find("\n") != std::string::npos;
  return {has_rows && slope >= kBoxLow && slope <= kBoxHigh && residual < kBoxResidual && elapsed < kBoxSeconds,
          fmt::format("slope {:.5f} in [{}, {}], residual {:.2e} (< {}), {:.3f} s (limit {} s)", slope, kBoxLow,
                      kBoxHigh, residual, kBoxResidual, elapsed, kBoxSeconds)};
}

Verdict cover_lemma() {
  gen::Rng rng(2025);
  std::size_t covering = 0, packing = 0;
  const std::size_t trials = 1000;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto spec = gen::periodic_spec(gen::ratio_levels(rng, gen::index(rng, 1, 3), 3, false));
    const double s = gen::uniform(rng, 0.05, 3.0);
    const auto cover = gen::antichain_cover(rng, spec, gen::index(rng, 1, 5), gen::uniform(rng, 0.1, 0.6));
    const auto redundant = gen::redundant_cover(rng, spec, 5, gen::uniform(rng, 0.1, 0.6));
    try {
      const auto w = cover_comparison_witness(spec, redundant, s, CoverClaim::covering);
      if (w.level_log_sums[w.level - w.min_level] <= w.cover_log_sum + 1e-12) ++covering;
    } catch (const AxiomViolation&) {
    }
    try {
      const auto w = cover_comparison_witness(spec, cover, s, CoverClaim::packing);
      if (w.level_log_sums[w.level - w.min_level] >= w.cover_log_sum - 1e-12) ++packing;
    } catch (const AxiomViolation&) {
    }
  }
  return {covering == trials && packing == trials,
          fmt::format("cover inequality witnessed {}/{}, disjoint packing inequality {}/{}", covering, trials, packing,
                      trials)};
}

Verdict ultrametric_identities() {
  std::size_t violations = 0, triples = 0, pairs = 0;
  const std::vector<ConstructionSpec> trees{
      constant_spec({0.4, 0.3}),
      constant_spec({0.3, 0.25, 0.2}),
      ConstructionSpec({}, PeriodicTail{{Level{2, {0.45, 0.2}}, Level{3, {0.1, 0.3, 0.25}}}},
                       ConstructionKind::spatially_symmetric)};
  for (const auto& spec : trees) {
    for (std::size_t n = 1; n <= 5; ++n) {
      std::vector<Word> words;
      for_each_word(spec, n, 1u << 10, [&](const Word& w) { words.push_back(w); });
      const std::size_t m = words.size();
      std::vector<double> rho(m * m);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) rho[a * m + b] = rho_distance(spec, words[a], words[b]);
      }
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) {
          const double ab = rho[a * m + b];
          if (ab != rho[b * m + a] || (ab == 0.0) != (a == b)) ++violations;
          for (std::size_t c = 0; c < m; ++c) {
            ++triples;
            if (ab > std::max(rho[a * m + c], rho[c * m + b])) ++violations;
          }
        }
      }
      if (n != 5) continue;
      // diam [i] = 𝚌_i: the widest pair of depth-5 extensions of i.
      for (std::size_t len = 0; len <= 4; ++len) {
        for_each_word(spec, len, 1u << 10, [&](const Word& i) {
          double product = 1.0;
          for (std::size_t k = 1; k <= len; ++k) product *= spec.ratio(k, i.at_level(k));
          double widest = 0.0;
          for (std::size_t a = 0; a < m; ++a) {
            if (!i.is_prefix_of(words[a])) continue;
            for (std::size_t b = 0; b < m; ++b) {
              if (i.is_prefix_of(words[b])) widest = std::max(widest, rho[a * m + b]);
            }
          }
          ++pairs;
          if (std::abs(widest - product) > 1e-12 * product) ++violations;
        });
      }
    }
  }
  return {violations == 0, fmt::format("{} triples and {} cylinder diameters checked, {} violations", triples, pairs,
                                       violations)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"closed-form dimension of middle thirds", closed_form_dimension},
      {"two-ratio level dimensions", two_ratio_root},
      {"doubling blocks separate s_* and s^*", doubling_blocks},
      {"entropy averages", entropy_averages},
      {"square-summability detector", condition_detector},
      {"L^q dimensions and the sandwich at q = 1", lq_dimensions_doubling},
      {"filtration axioms and local dimension", filtration_axioms},
      {"uniformly perfect example", uniformly_perfect},
      {"box counting on middle thirds", box_counting},
      {"cover comparison on random covers", cover_lemma},
      {"ultrametric and diameter identities", ultrametric_identities},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
