#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "tsabc/smc.hpp"

using namespace tsabc;

namespace {

ParticleSystem make_system(std::vector<double> x, std::vector<double> w) {
  ParticleSystem ps;
  ps.u = std::vector<double>(x.size(), 0.0);
  ps.x = std::move(x);
  ps.w = std::move(w);
  ps.t = 1;
  return ps;
}

FilterOptions toy_options(std::size_t particles, double eps, int threads = 1) {
  FilterOptions opts;
  opts.particles = particles;
  opts.kernel = AbcKernel(eps, 1);
  opts.threads = threads;
  return opts;
}

}  // namespace

TEST_CASE("multinomial resampling: uniformity, degenerate weight, offspring counts") {
  // Equal weights: resampled indices are uniform; chi-square over 10^4 repeats.
  const std::size_t n = 10;
  auto ps = make_system(std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9},
                        std::vector<double>(n, 1.0));
  RngStream rng(41);
  std::vector<double> counts(n, 0.0);
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    const auto out = resample_multinomial(ps, rng);
    for (double x : out->x) counts[static_cast<std::size_t>(x)] += 1.0;
    for (double w : out->w) CHECK(w == 1.0);
  }
  const double expected = static_cast<double>(reps * n) / static_cast<double>(n);
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 21.666);  // chi-square(9), 1% upper tail

  // Single positive weight: every offspring copies that particle.
  auto one = make_system({1.0, 2.0, 3.0}, {0.0, 5.0, 0.0});
  const auto out = resample_multinomial(one, rng);
  for (double x : out->x) CHECK(x == 2.0);

  // Expected offspring of particle i is N w_i / sum w.
  auto skew = make_system({0.0, 1.0}, {3.0, 1.0});
  double first = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto o = resample_multinomial(skew, rng);
    for (double x : o->x) first += x == 0.0;
  }
  const double mean_first = first / reps;
  CHECK(std::abs(mean_first - 1.5) < 3.0 * std::sqrt(2.0 * 0.75 * 0.25 / reps));

  // All-zero weights signal collapse through the optional.
  auto dead = make_system({1.0, 2.0}, {0.0, 0.0});
  CHECK_FALSE(resample_multinomial(dead, rng).has_value());
  CHECK_FALSE(resample_systematic(dead, rng).has_value());
}

TEST_CASE("systematic resampling preserves proportions") {
  auto ps = make_system({0.0, 1.0, 2.0, 3.0}, {4.0, 2.0, 1.0, 1.0});
  RngStream rng(42);
  std::map<double, int> counts;
  const int reps = 4000;
  for (int r = 0; r < reps; ++r) {
    const auto out = resample_systematic(ps, rng);
    for (double x : out->x) ++counts[x];
  }
  CHECK(std::abs(counts[0.0] / static_cast<double>(reps) - 2.0) < 0.05);
}

TEST_CASE("filter expectation: normalization, point mass, collapse error") {
  auto ps = make_system({2.0, 4.0}, {1.0, 3.0});
  CHECK(filter_expectation(ps, [](double, double) { return 1.0; }) == 1.0);
  CHECK(filter_expectation(ps, [](double x, double) { return x; }) ==
        doctest::Approx(3.5).epsilon(1e-14));
  auto single = make_system({7.0}, {2.0});
  CHECK(filter_expectation(single, [](double x, double) { return x; }) == 7.0);
  auto dead = make_system({1.0}, {0.0});
  CHECK_THROWS_AS(filter_expectation(dead, [](double x, double) { return x; }),
                  std::invalid_argument);
}

TEST_CASE("bootstrap weights are indicators; huge tolerance gives exact factors") {
  ToyHmmModel model;
  const auto theta = model.params_from_values({0.0});
  const auto y = ObservationSeries::from_scalars({0.1, -0.3, 0.2});

  RngStream rng(43);
  auto res = smc_abc_filter(model, theta, y, toy_options(64, 0.8), rng);
  for (double w : res.particles.w) CHECK((w == 0.0 || w == 1.0));

  const double eps = 50.0;  // every draw hits
  RngStream rng2(44);
  auto sure = smc_abc_filter(model, theta, y, toy_options(64, eps), rng2);
  for (double f : sure.nc.per_step_log_factors)
    CHECK(f == doctest::Approx(-std::log(2.0 * eps)).epsilon(1e-12));
  CHECK(sure.nc.log_value ==
        doctest::Approx(-3.0 * std::log(2.0 * eps)).epsilon(1e-12));

  // Alive at certain hits: m_t == N exactly and the same per-step factor.
  RngStream rng3(45);
  auto alive = alive_smc_filter(model, theta, y, toy_options(16, eps), rng3);
  for (long long m : alive.nc.trial_counts) CHECK(m == 16);
  for (double f : alive.nc.per_step_log_factors)
    CHECK(f == doctest::Approx(-std::log(2.0 * eps)).epsilon(1e-12));
  CHECK(alive.particles.size() == 15);  // keeps N-1 alive particles
}

TEST_CASE("normalizing-constant estimates are unbiased on the degenerate toy") {
  ToyHmmModel model;
  const auto theta = model.params_from_values({0.2});
  const double eps = 0.6;
  for (const auto& y_values : {std::vector<double>{0.5}, std::vector<double>{0.5, -0.4}}) {
    const auto y = ObservationSeries::from_scalars(std::vector<double>(y_values));
    const double truth = testutil::toy_hmm_nc_quadrature(model, 0.2, y_values, eps);
    const int reps = 20000;
    std::vector<double> std_est(reps), alive_est(reps);
    RngStream rng(46);
    for (int r = 0; r < reps; ++r) {
      auto rs = smc_abc_filter(model, theta, y, toy_options(16, eps), rng);
      std_est[r] = rs.nc.collapsed_at ? 0.0 : std::exp(rs.nc.log_value);
      auto ra = alive_smc_filter(model, theta, y, toy_options(8, eps), rng);
      alive_est[r] = std::exp(ra.nc.log_value);
      for (long long m : ra.nc.trial_counts) CHECK(m >= 8);
    }
    CHECK(std::abs(testutil::mean(std_est) - truth) < 3.0 * testutil::mc_se(std_est));
    CHECK(std::abs(testutil::mean(alive_est) - truth) < 3.0 * testutil::mc_se(alive_est));
  }
}

TEST_CASE("custom latent proposals reweight correctly (unbiased at n = 1)") {
  ToyHmmModel model;
  const auto theta = model.params_from_values({0.0});
  const std::vector<double> y_values{0.8};
  const auto y = ObservationSeries::from_scalars(std::vector<double>(y_values));
  const double eps = 0.5;
  const double truth = testutil::toy_hmm_nc_quadrature(model, 0.0, y_values, eps);

  FilterOptions opts = toy_options(32, eps);
  // Wider-than-transition proposal centered off the mode.
  opts.proposal = LatentProposal{
      [](const ParameterVector&, double, std::size_t, RngStream& rng) {
        return sample_gaussian(rng, 0.5, 1.6);
      },
      [](const ParameterVector&, double, double x, std::size_t) {
        return normal_logpdf(x, 0.5, 1.6);
      }};
  const int reps = 30000;
  std::vector<double> est(reps);
  RngStream rng(47);
  bool saw_fractional_weight = false;
  for (int r = 0; r < reps; ++r) {
    auto res = smc_abc_filter(model, theta, y, opts, rng);
    est[r] = res.nc.collapsed_at ? 0.0 : std::exp(res.nc.log_value);
    for (double w : res.particles.w)
      if (w != 0.0 && w != 1.0) saw_fractional_weight = true;
  }
  CHECK(saw_fractional_weight);
  CHECK(std::abs(testutil::mean(est) - truth) < 3.0 * testutil::mc_se(est));

  // Without an evaluable transition density the custom proposal is refused.
  class HiddenDensityToy final : public ToyHmmModel {
   public:
    bool has_transition_log_density() const override { return false; }
  };
  HiddenDensityToy hidden;
  RngStream rng2(48);
  CHECK_THROWS_AS(smc_abc_filter(hidden, theta, y, opts, rng2), CapabilityError);
}

TEST_CASE("collapse dichotomy on the toy: standard dies, alive survives") {
  ToyHmmModel model;
  const auto theta = model.params_from_values({0.0});
  const auto y = ObservationSeries::from_scalars({2.5, 2.4, 2.6, 2.3});
  const double eps = 0.05;  // tiny ball far in the tail
  int std_collapsed = 0;
  RngStream rng(49);
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    auto rs = smc_abc_filter(model, theta, y, toy_options(16, eps), rng);
    std_collapsed += rs.nc.collapsed_at.has_value();
    auto ra = alive_smc_filter(model, theta, y, toy_options(8, eps), rng);
    CHECK_FALSE(ra.cap_failed);
    CHECK(std::isfinite(ra.nc.log_value));
  }
  CHECK(std_collapsed > reps * 0.9);
}

TEST_CASE("alive cap failure is flagged and distinct from collapse") {
  ToyHmmModel model;
  const auto theta = model.params_from_values({0.0});
  const auto y = ObservationSeries::from_scalars({30.0});  // unreachable ball
  FilterOptions opts = toy_options(4, 0.01);
  opts.cap = 500;
  RngStream rng(50);
  auto res = alive_smc_filter(model, theta, y, opts, rng);
  CHECK(res.cap_failed);
  CHECK(res.cap_failed_at == 1);
  CHECK_FALSE(res.nc.collapsed_at.has_value());
  CHECK(res.nc.log_value == kNegInf);
}

TEST_CASE("filter means agree with the quadrature posterior on the toy") {
  ToyHmmModel model;
  const auto theta = model.params_from_values({0.3});
  const std::vector<double> y_values{0.7, 0.5};
  const auto y = ObservationSeries::from_scalars(std::vector<double>(y_values));
  const double eps = 0.7;

  // Quadrature posterior mean of the single latent variable given both balls.
  const double s0 = model.config().sigma0, sy = model.config().sigma_y;
  auto joint = [&](double x) {
    double f = std::exp(normal_logpdf(x, 0.3, s0));
    for (double yi : y_values) f *= testutil::gaussian_ball_mass(x, sy, yi, eps);
    return f;
  };
  const double z = integrate(joint, -10.0, 10.0, 4001);
  const double post_mean =
      integrate([&](double x) { return x * joint(x); }, -10.0, 10.0, 4001) / z;

  RngStream rng(51);
  const int reps = 800;
  std::vector<double> means;
  means.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    auto res = smc_abc_filter(model, theta, y, toy_options(64, eps), rng);
    if (res.nc.collapsed_at) continue;
    means.push_back(filter_expectation(res.particles, [](double x, double) { return x; }));
  }
  REQUIRE(means.size() > 700);
  CHECK(std::abs(testutil::mean(means) - post_mean) < 3.0 * testutil::mc_se(means));
}

TEST_CASE("filters replay deterministically and match across thread counts") {
  SvModel model;
  const auto theta = model.default_params();
  RngStream drng(52);
  const auto y = model.simulate(theta, 60, drng).obs;

  for (int threads : {1, 4}) {
    RngStream a(53);
    auto ra = smc_abc_filter(model, theta, y, toy_options(128, 2.0, threads), a);
    RngStream b(53);
    auto rb = smc_abc_filter(model, theta, y, toy_options(128, 2.0, threads), b);
    CHECK(ra.nc.log_value == rb.nc.log_value);
    CHECK(ra.particles.x == rb.particles.x);
  }

  RngStream s1(54), s4(54);
  auto serial = smc_abc_filter(model, theta, y, toy_options(128, 2.0, 1), s1);
  auto parallel = smc_abc_filter(model, theta, y, toy_options(128, 2.0, 4), s4);
  CHECK(serial.nc.log_value == parallel.nc.log_value);
  CHECK(serial.particles.x == parallel.particles.x);
  CHECK(serial.particles.w == parallel.particles.w);

  RngStream a1(55), a4(55);
  auto alive_serial = alive_smc_filter(model, theta, y, toy_options(32, 2.0, 1), a1);
  auto alive_parallel = alive_smc_filter(model, theta, y, toy_options(32, 2.0, 4), a4);
  CHECK(alive_serial.nc.log_value == alive_parallel.nc.log_value);
  CHECK(alive_serial.nc.trial_counts == alive_parallel.nc.trial_counts);
  CHECK(alive_serial.particles.x == alive_parallel.particles.x);
}
