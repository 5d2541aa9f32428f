#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "tsabc/abc.hpp"
#include "tsabc/mcmc.hpp"
#include "tsabc/models.hpp"

using namespace tsabc;

TEST_CASE("ball volumes") {
  CHECK(ball_volume(1, 0.5) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ball_volume(2, 1.0) == doctest::Approx(3.14159265358979324).epsilon(1e-13));
  CHECK(ball_volume(3, 1.0) == doctest::Approx(4.18879020478639098).epsilon(1e-13));
  CHECK_THROWS_AS(ball_volume(0, 1.0), std::domain_error);
  CHECK_THROWS_AS(ball_volume(1, 0.0), std::domain_error);
}

TEST_CASE("hit indicator is a strict (open-ball) test") {
  AbcKernel k1(10.0, 1);
  CHECK(k1.hit1(0.0, 0.0));
  CHECK_FALSE(k1.hit1(0.0, 10.0));  // boundary excluded
  AbcKernel k2(0.6, 2);
  const std::vector<double> u{0.3, 0.4}, y{0.0, 0.0};
  CHECK(k2.hit(u, y));  // distance 0.5
  const std::vector<double> y1{0.0};
  CHECK_THROWS_AS(k2.hit(u, y1), std::invalid_argument);
}

TEST_CASE("quadrature rules on a known integral") {
  const auto f = [](double x) { return std::sin(x); };
  CHECK(integrate(f, 0.0, 3.14159265358979324, 2001, QuadratureRule::simpson) ==
        doctest::Approx(2.0).epsilon(1e-10));
  CHECK(integrate(f, 0.0, 3.14159265358979324, 20000, QuadratureRule::midpoint) ==
        doctest::Approx(2.0).epsilon(1e-6));
  CHECK_THROWS_AS(QuadratureGrid(1.0, 0.0, 10), std::domain_error);
  CHECK_THROWS_AS(QuadratureGrid(0.0, 1.0, 1), std::domain_error);
}

TEST_CASE("smoothed gaussian log likelihood: closed form values") {
  // All the observation mass sits inside the ball when eps = 10.
  CHECK(smoothed_gaussian_loglik(0.0, 1.0, 0.0, 10.0) ==
        doctest::Approx(std::log(0.05)).epsilon(1e-12));
  // eps -> 0 recovers the plain density.
  CHECK(std::abs(smoothed_gaussian_loglik(0.0, 1.0, 0.0, 1e-4) + 0.9189385332046727) < 1e-6);
  // Location-family symmetry in (mean, y).
  CHECK(smoothed_gaussian_loglik(0.7, 1.3, -0.2, 0.5) ==
        doctest::Approx(smoothed_gaussian_loglik(-0.2, 1.3, 0.7, 0.5)).epsilon(1e-14));
}

TEST_CASE("analytic and quadrature smoothed likelihoods agree") {
  NormalLocationModel model;
  const auto y = ObservationSeries::from_scalars({0.4, -1.1, 2.3, 0.0, 0.9});
  const auto law = model.make_law(y);
  const auto bound = law->bind(model.params_from_values({0.3}));
  const double eps = 0.8;
  const double analytic = abc_loglik_analytic(*bound, y, eps);
  const double quad = abc_loglik_quadrature(*bound, y, eps, 10001);
  CHECK(analytic == doctest::Approx(quad).epsilon(1e-8));
}

TEST_CASE("huge tolerance: each factor approaches log(1/2eps)") {
  NormalLocationModel model;
  const auto y = ObservationSeries::from_scalars({0.2});
  const auto bound = model.make_law(y)->bind(model.params_from_values({0.0}));
  const double eps = 1000.0;
  CHECK(bound->smoothed_loglik(0, eps) == doctest::Approx(-std::log(2 * eps)).epsilon(1e-12));
}

TEST_CASE("factorization: series log likelihood is the sum over singletons") {
  NormalLocationModel model;
  const auto y2 = ObservationSeries::from_scalars({0.5, -0.7});
  const auto ya = ObservationSeries::from_scalars({0.5});
  const auto yb = ObservationSeries::from_scalars({-0.7});
  const auto theta = model.params_from_values({0.2});
  const double eps = 0.6;
  const double joint = abc_loglik_analytic(*model.make_law(y2)->bind(theta), y2, eps);
  const double a = abc_loglik_analytic(*model.make_law(ya)->bind(theta), ya, eps);
  const double b = abc_loglik_analytic(*model.make_law(yb)->bind(theta), yb, eps);
  CHECK(joint == doctest::Approx(a + b).epsilon(1e-14));
}

TEST_CASE("smoothed density integrates to one in y") {
  const double theta = 0.4, eps = 0.7;
  const double mass = integrate(
      [&](double y) { return std::exp(smoothed_gaussian_loglik(theta, 1.0, y, eps)); },
      theta - 12.0 - eps, theta + 12.0 + eps, 8001);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Jensen lower bound on the smoothed log density") {
  // log p^eps(y) >= (1/2eps) * Integral of log p over the ball.
  for (double eps : {0.3, 1.0}) {
    for (double y : {0.0, 0.8, 2.5}) {
      const double lhs = smoothed_gaussian_loglik(0.0, 1.0, y, eps);
      const double rhs = integrate([&](double u) { return normal_logpdf(u, 0.0, 1.0); },
                                   y - eps, y + eps, 4001) /
                         (2.0 * eps);
      CHECK(lhs >= rhs - 1e-10);
    }
  }
}

TEST_CASE("ABC posterior mean converges monotonically as eps shrinks") {
  const std::vector<double> y{0.3, -0.2, 0.9, 1.4, 0.1};
  double s = 0.0;
  for (double v : y) s += v;
  const double exact = s / (static_cast<double>(y.size()) + 1.0);
  double prev = 1e9;
  for (double eps : {1.0, 0.1, 0.01}) {
    const double m = testutil::normal_location_abc_posterior_mean(y, eps);
    const double gap = std::abs(m - exact);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("randomized invariants: ball support, hit consistency, factorization") {
  // Hand-rolled generators over dimensions, tolerances and data; the
  // properties must hold for every draw, not just curated cases.
  RngStream gen(9090);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t dim = 1 + static_cast<std::size_t>(gen.next() % 4);
    const double eps = std::exp(3.0 * (gen.uniform() - 0.5));
    const AbcKernel kernel(eps, dim);
    std::vector<double> center(dim);
    for (auto& c : center) c = 4.0 * (gen.uniform() - 0.5);
    const auto z = sample_uniform_ball(gen, center, eps);
    CHECK(kernel.hit(z, center));  // ball draws always hit their own center
    double r2 = 0.0;
    for (std::size_t j = 0; j < dim; ++j) r2 += (z[j] - center[j]) * (z[j] - center[j]);
    CHECK((r2 < eps * eps) == kernel.hit(z, center));
  }

  // Factorized likelihood: the joint equals the sum over singleton series
  // for random data, parameters and tolerances.
  NormalLocationModel model;
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t n = 1 + gen.next() % 6;
    std::vector<double> values(n);
    for (auto& v : values) v = 5.0 * (gen.uniform() - 0.5);
    const double theta_v = 3.0 * (gen.uniform() - 0.5);
    const double eps = std::exp(2.0 * (gen.uniform() - 0.5));
    const auto theta = model.params_from_values({theta_v});
    const auto joint_series = ObservationSeries::from_scalars(std::vector<double>(values));
    const double joint =
        abc_loglik_analytic(*model.make_law(joint_series)->bind(theta), joint_series, eps);
    double sum = 0.0;
    for (double v : values) {
      const auto single = ObservationSeries::from_scalars({v});
      sum += abc_loglik_analytic(*model.make_law(single)->bind(theta), single, eps);
    }
    CHECK(joint == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("theta-star oracle: location family keeps the truth, scale family shrinks") {
  // Location family: smoothing is a symmetric convolution, the argmax stays put.
  auto loc_loglik = [](double theta, double y) {
    return smoothed_gaussian_loglik(theta, 1.0, y, 0.7);
  };
  auto true_density = [](double y) { return std::exp(normal_logpdf(y, 0.25, 1.0)); };
  const auto grid = linspace(0.25 - 0.5, 0.25 + 0.5, 41);  // grid contains theta* = 0.25
  const QuadratureGrid ygrid(-8.0, 8.0, 2001);
  const auto res = theta_star_eps(loc_loglik, true_density, grid, ygrid);
  CHECK(res.value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK_FALSE(res.boundary_warning);

  // Scale family at eps = 0.5: the smeared model has inflated variance, so
  // the best-fitting sigma drops strictly below the truth.
  auto scale_loglik = [](double sigma, double y) {
    return smoothed_gaussian_loglik(0.0, sigma, y, 0.5);
  };
  auto std_normal = [](double y) { return std::exp(normal_logpdf(y, 0.0, 1.0)); };
  const auto sgrid = linspace(0.5, 1.5, 501);
  const auto sres = theta_star_eps(scale_loglik, std_normal, sgrid, ygrid);
  CHECK(sres.value < 1.0);
  CHECK(sres.value > 0.8);
  CHECK_FALSE(sres.boundary_warning);

  // Small eps: the oracle lands within a grid spacing of the truth.
  auto scale_loglik_small = [](double sigma, double y) {
    return smoothed_gaussian_loglik(0.0, sigma, y, 1e-3);
  };
  const auto sres2 = theta_star_eps(scale_loglik_small, std_normal, sgrid, ygrid);
  CHECK(std::abs(sres2.value - 1.0) <= 0.002 + 1e-12);

  // A grid that misses the optimum flags its boundary.
  const auto bad_grid = linspace(1.5, 2.0, 11);
  CHECK(theta_star_eps(scale_loglik, std_normal, bad_grid, ygrid).boundary_warning);
}
