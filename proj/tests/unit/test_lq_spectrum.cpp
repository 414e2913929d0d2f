#include <doctest.h>

#include <cmath>
#include <vector>

#include <moran/construction.hpp>
#include <moran/error.hpp>
#include <moran/filtration.hpp>
#include <moran/lq_spectrum.hpp>
#include <moran/measure.hpp>

#include "oracles.hpp"

using namespace moran;

namespace {

/// log δ_n of the middle-thirds threshold filtration with C0 = 1/2.
double thirds_log_delta(std::size_t n) { return std::log(0.5) - (static_cast<double>(n) + 1) * std::log(3.0); }

/// τ_n of a Bernoulli(p, 1 - p) measure on middle thirds: every level-n
/// cylinder is a member, so Σ μ^q = (p^q + (1-p)^q)^n.
std::vector<double> bernoulli_tau(double p, double q, std::size_t depth) {
  std::vector<double> out;
  const double per_level = std::log(std::pow(p, q) + std::pow(1 - p, q));
  for (std::size_t n = 1; n <= depth; ++n) out.push_back(static_cast<double>(n) * per_level / thirds_log_delta(n));
  return out;
}

}  // namespace

TEST_CASE("tau sequence of Bernoulli measures on middle thirds") {
  const auto spec = middle_thirds_spec();
  const auto f = build_symbolic_filtration(spec, 120);
  for (double p : {0.5, 0.3, 0.1}) {
    const auto measure = make_weighted_measure(spec, bernoulli_weights({p, 1 - p}));
    const std::vector<double> qs{0.0, 0.4, 2.0, 5.0};
    const auto spectra = lq_spectrum_multi(measure, f, qs);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const auto expected = bernoulli_tau(p, qs[i], 120);
      REQUIRE(spectra[i].tau_sequence.size() == 120);
      for (std::size_t n = 0; n < 120; ++n) {
        CHECK(spectra[i].tau_sequence[n] == doctest::Approx(expected[n]).epsilon(1e-10));
      }
      CHECK(spectra[i].tail_window == 24);
      CHECK(spectra[i].tau == doctest::Approx(oracle::tail_min(expected, 24)).epsilon(1e-10));
    }
  }
}

TEST_CASE("dimensions converge to the closed form and decrease in q") {
  const auto measure = make_weighted_measure(middle_thirds_spec(), bernoulli_weights({0.3, 0.7}));
  const std::vector<double> qs{0.5, 0.9, 1.1, 2.0, 4.0};
  const auto dims = lq_dimensions(measure, qs, 2000);
  for (std::size_t i = 0; i < qs.size(); ++i) {
    const double q = qs[i];
    const double limit = std::log(std::pow(0.3, q) + std::pow(0.7, q)) / ((1 - q) * std::log(3.0));
    CHECK(dims[i].dimension == doctest::Approx(limit).epsilon(2e-3));
    if (i > 0) CHECK(dims[i].dimension < dims[i - 1].dimension);
  }
  CHECK_THROWS_AS(lq_dimension(measure, 1.0, 50), InvalidArgument);
  CHECK_THROWS_AS(lq_dimension(measure, -0.5, 50), InvalidArgument);
}

TEST_CASE("local spectra on ρ-balls") {
  const auto spec = middle_thirds_spec();
  const auto measure = make_uniform_measure(spec);
  const auto f = build_symbolic_filtration(spec, 60);
  const Word x(std::vector<Word::Index>(80, 1));
  const double q = 2.0;
  const std::vector<double> radii{1.0, 1.0 / 3, 1.0 / 27};
  const auto local = lq_spectrum_local(measure, f, q, x, radii);
  REQUIRE(local.size() == 3);
  const auto global = lq_spectrum_symbolic(measure, f, q);
  CHECK(local[0].tau_sequence == global.tau_sequence);
  CHECK(local[0].local);
  CHECK_FALSE(global.local);
  // The ball of radius 3^-m is the cylinder of x|_m: 2^{n-m} members of
  // mass 2^-n, or the single member containing it while n <= m.
  for (std::size_t r = 1; r < 3; ++r) {
    const std::size_t m = r == 1 ? 1 : 3;
    for (std::size_t n = 1; n <= 60; ++n) {
      const double count = n > m ? static_cast<double>(n - m) : 0.0;
      const double expected = (count - q * static_cast<double>(n)) * std::log(2.0) / thirds_log_delta(n);
      CHECK(local[r].tau_sequence[n - 1] == doctest::Approx(expected).epsilon(1e-10));
    }
  }
  const std::vector<double> rising{0.1, 0.2};
  CHECK_THROWS_AS(lq_spectrum_local(measure, f, q, x, rising), InvalidArgument);
  LqOptions half;
  half.x_path = x;
  CHECK_THROWS_AS(lq_spectrum_symbolic(measure, f, q, half), InvalidArgument);
}

TEST_CASE("explicit filtrations use their member lists") {
  const auto spec = middle_thirds_spec();
  const auto measure = make_weighted_measure(spec, bernoulli_weights({0.25, 0.75}));
  const std::vector<std::vector<Word>> levels{{Word{1}, Word{2}}, {Word{1}, Word{2, 1}, Word{2, 2}}};
  const auto f = hand_built_filtration({0.4, 0.2}, {0.1, 0.05}, levels, 0.5, spec);
  LqOptions options;
  options.tail_window = 1;
  const auto est = lq_spectrum_symbolic(measure, f, 2.0, options);
  const double level2 = 0.25 * 0.25 + std::pow(0.75 * 0.25, 2) + std::pow(0.75 * 0.75, 2);
  CHECK(est.tau_sequence[0] == doctest::Approx(std::log(0.25 * 0.25 + 0.75 * 0.75) / std::log(0.1)));
  CHECK(est.tau_sequence[1] == doctest::Approx(std::log(level2) / std::log(0.05)));
}

TEST_CASE("sandwich around q = 1 for a Bernoulli measure") {
  const auto measure = make_weighted_measure(middle_thirds_spec(), bernoulli_weights({0.3, 0.7}));
  const auto grid = default_q_grid();
  const auto report = dim_at_one_sandwich_check(measure, 2048, grid, kSandwichSlack, 4, 1);
  CHECK(report.q_below == 0.99);
  CHECK(report.q_above == 1.01);
  CHECK(report.monotone);
  // Every path has the same entropy average, H(0.3) / log 3.
  const double entropy = oracle::bernoulli_entropy_ratio(0.3);
  CHECK(report.dim_above <= entropy + kSandwichSlack);
  CHECK(report.dim_below >= entropy - kSandwichSlack);
  for (double lo : report.lower_local) CHECK(lo == doctest::Approx(entropy).epsilon(1e-12));
  CHECK(report.sandwich_holds);

  const std::vector<double> one_sided{1.5, 2.0};
  CHECK_THROWS_AS(dim_at_one_sandwich_check(measure, 50, one_sided), InvalidArgument);
  const std::vector<double> with_one{0.5, 1.0, 2.0};
  CHECK_THROWS_AS(dim_at_one_sandwich_check(measure, 50, with_one), InvalidArgument);
}
