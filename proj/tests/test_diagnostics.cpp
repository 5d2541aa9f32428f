#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "tsabc/diagnostics.hpp"
#include "tsabc/distributions.hpp"

using namespace tsabc;

namespace {

std::vector<double> ar1(double coeff, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed);
  std::vector<double> v(n);
  double x = 0.0;
  for (auto& out : v) {
    x = coeff * x + sample_gaussian(rng, 0.0, 1.0);
    out = x;
  }
  return v;
}

}  // namespace

TEST_CASE("autocorrelation: unit lag zero, white-noise band, AR(1) oracle") {
  const auto wn = ar1(0.0, 10000, 80);
  const auto acf = autocorrelation(wn, 20);
  CHECK(acf.acf[0] == 1.0);

  // 3/sqrt(n) band holds for at least 99% of seeds.
  int covered = 0;
  const int seeds = 200;
  for (int s = 0; s < seeds; ++s) {
    const auto series = ar1(0.0, 10000, 1000 + static_cast<std::uint64_t>(s));
    const auto a = autocorrelation(series, 1);
    covered += std::abs(a.acf[1]) < 3.0 / std::sqrt(10000.0);
  }
  CHECK(covered >= 198);

  const auto ar = ar1(0.9, 100000, 81);
  const auto aacf = autocorrelation(ar, 5);
  CHECK(std::abs(aacf.acf[1] - 0.9) < 0.01);
  for (double r : aacf.acf) {
    CHECK(r <= 1.0);
    CHECK(r >= -1.0);
  }

  const std::vector<double> constant(100, 2.5);
  CHECK_THROWS_AS(autocorrelation(constant, 5), std::invalid_argument);
  CHECK_THROWS_AS(autocorrelation(wn, 0), std::invalid_argument);
  const std::vector<double> tiny{1.0, 2.0};
  CHECK_THROWS_AS(autocorrelation(tiny, 5), std::invalid_argument);
}

TEST_CASE("effective sample size: iid, AR(1), boundary") {
  const auto wn = ar1(0.0, 10000, 82);
  const double e = ess(wn);
  CHECK(e > 0.8 * 10000.0);
  CHECK(e < 1.2 * 10000.0);

  const auto ar = ar1(0.9, 100000, 83);
  const double ratio = ess(ar) / 100000.0;
  const double expected = 0.1 / 1.9;
  CHECK(std::abs(ratio - expected) < 0.3 * expected);

  const std::vector<double> two{1.0, 2.0};
  const double e2 = ess(two);
  CHECK(e2 > 0.0);
  CHECK(std::isfinite(e2));

  const std::vector<double> constant(100, 1.0);
  CHECK_THROWS_AS(ess(constant), std::invalid_argument);
}

TEST_CASE("kde: symmetry, single point behind the flag, known-density accuracy") {
  const std::vector<double> pair{-1.0, 1.0};
  const auto sym = kde(pair, linspace(-3.0, 3.0, 301), 1.0);
  for (std::size_t i = 0; i < sym.grid.size(); ++i) {
    const std::size_t mirror = sym.grid.size() - 1 - i;
    CHECK(sym.density[i] == doctest::Approx(sym.density[mirror]).epsilon(1e-12));
  }

  const std::vector<double> one{0.0};
  CHECK_THROWS_AS(kde(one, linspace(-1.0, 1.0, 11), 0.5), std::invalid_argument);
  const auto single = kde(one, {0.0}, 0.5, /*allow_single=*/true);
  CHECK(single.density[0] ==
        doctest::Approx(1.0 / (0.5 * std::sqrt(2.0 * 3.14159265358979324))).epsilon(1e-12));
  CHECK_THROWS_AS(kde(pair, {0.0}, 0.0), std::domain_error);

  RngStream rng(84);
  std::vector<double> sample(100000);
  for (auto& v : sample) v = sample_gaussian(rng, 0.0, 1.0);
  const auto est = kde_silverman(sample, linspace(-3.0, 3.0, 121));
  for (std::size_t i = 0; i < est.grid.size(); ++i) {
    const double truth = std::exp(normal_logpdf(est.grid[i], 0.0, 1.0));
    CHECK(std::abs(est.density[i] - truth) < 0.01);
    CHECK(est.density[i] >= 0.0);
  }

  // Density integrates to about one on a grid covering the sample widely.
  const auto wide = kde_silverman(sample, linspace(-6.0, 6.0, 601));
  double integral = 0.0;
  for (std::size_t i = 1; i < wide.grid.size(); ++i)
    integral +=
        0.5 * (wide.density[i] + wide.density[i - 1]) * (wide.grid[i] - wide.grid[i - 1]);
  CHECK(std::abs(integral - 1.0) < 1e-3);
}

TEST_CASE("summarize: acceptance accounting, quantile order, conjugate mean") {
  Trace never;
  never.param_names = {"x"};
  never.dim = 1;
  never.iterations = 10;
  never.draws.assign(10, 1.0);
  never.accepted.assign(10, 0);
  const auto s0 = summarize(never);
  CHECK(s0.acceptance_rate == 0.0);
  CHECK(s0.params[0].ess == 0.0);  // frozen chain

  Trace alt = never;
  for (std::size_t i = 0; i < alt.iterations; ++i) {
    alt.accepted[i] = i % 2;
    alt.draws[i] = static_cast<double>(i % 3);
  }
  const auto s1 = summarize(alt);
  CHECK(s1.acceptance_rate == 0.5);
  CHECK(s1.params[0].q05 <= s1.params[0].q50);
  CHECK(s1.params[0].q50 <= s1.params[0].q95);

  // Chain over the conjugate posterior: the summary mean matches S/(n+1).
  NormalLocationModel model;
  RngStream drng(85);
  const auto y = model.simulate(model.params_from_values({0.5}), 50, drng).obs;
  double s = 0.0;
  for (std::size_t i = 0; i < y.n; ++i) s += y.scalar(i);
  const auto law = model.make_law(y);
  MarginalMh kernel(*law, model, AbcKernel(0.01, 1), Proposal::random_walk(1, 0.5));
  RngStream rng(86);
  const auto trace = run_chain(kernel, kernel.init({std::vector<double>{0.0}}, rng), 40000, rng);
  const auto summary = summarize(trace);
  const double se = summary.params[0].sd / std::sqrt(summary.params[0].ess);
  CHECK(std::abs(summary.params[0].mean - s / 51.0) < 3.0 * se);

  CHECK_THROWS_AS(summarize(Trace{}), std::invalid_argument);
}
