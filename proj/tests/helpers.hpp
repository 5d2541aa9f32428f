#pragma once

// Shared oracles and small statistics used across the test suites. Everything
// here is independent of the sampler implementations it checks: quadrature,
// closed-form conjugate algebra and plain sample statistics only.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "tsabc/abc.hpp"
#include "tsabc/diagnostics.hpp"
#include "tsabc/distributions.hpp"
#include "tsabc/models.hpp"

namespace testutil {

inline double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double variance(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size() - 1);
}

// One-sample Kolmogorov-Smirnov statistic against a cdf.
template <class Cdf>
double ks_statistic(std::vector<double> sample, Cdf&& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

// Asymptotic one-sample KS critical value at the 1% level.
inline double ks_critical_1pct(std::size_t n) {
  return 1.6276 / std::sqrt(static_cast<double>(n));
}

// Monte Carlo standard error of a sample mean.
inline double mc_se(std::span<const double> v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

// MCMC standard error of a chain mean via effective sample size.
inline double chain_se(std::span<const double> chain) {
  const double e = tsabc::ess(chain);
  return std::sqrt(variance(chain) / e);
}

// --- quadrature oracles -------------------------------------------------------

// Exact smoothed Gaussian ball mass Phi((y-mu+eps)/sd) - Phi((y-mu-eps)/sd).
inline double gaussian_ball_mass(double mu, double sd, double y, double eps) {
  return tsabc::normal_cdf_diff((y - mu - eps) / sd, (y - mu + eps) / sd);
}

// ABC posterior mean of the normal-location model by quadrature over theta
// (prior N(0,1), unit observation noise, analytic smoothed likelihood).
inline double normal_location_abc_posterior_mean(std::span<const double> y, double eps,
                                                 double lo = -8.0, double hi = 8.0,
                                                 std::size_t points = 4001) {
  auto log_post = [&](double theta) {
    double lp = tsabc::normal_logpdf(theta, 0.0, 1.0);
    for (double yi : y) lp += tsabc::smoothed_gaussian_loglik(theta, 1.0, yi, eps);
    return lp;
  };
  // Normalize against the peak to keep exp() in range.
  double peak = -1e300;
  for (double t : tsabc::linspace(lo, hi, 801)) peak = std::max(peak, log_post(t));
  const double z = tsabc::integrate([&](double t) { return std::exp(log_post(t) - peak); }, lo,
                                    hi, points);
  const double m = tsabc::integrate(
      [&](double t) { return t * std::exp(log_post(t) - peak); }, lo, hi, points);
  return m / z;
}

// Quadrature value of the toy HMM's smoothed likelihood
//   p^eps(y_{1:n} | mu) = Int N(x; mu, sigma0^2) prod_i pball(y_i | x) dx,
// the single-latent-variable structure of the degenerate-transition toy.
inline double toy_hmm_nc_quadrature(const tsabc::ToyHmmModel& model, double mu,
                                    std::span<const double> y, double eps,
                                    std::size_t points = 4001) {
  const double s0 = model.config().sigma0;
  const double sy = model.config().sigma_y;
  auto integrand = [&](double x) {
    double f = std::exp(tsabc::normal_logpdf(x, mu, s0));
    for (double yi : y) f *= gaussian_ball_mass(x, sy, yi, eps) / (2.0 * eps);
    return f;
  };
  return tsabc::integrate(integrand, mu - 10.0 * s0, mu + 10.0 * s0, points);
}

// Log version, quadrature oracle for the toy HMM's marginal MH chain.
inline double toy_hmm_abc_loglik(const tsabc::ToyHmmModel& model, double mu,
                                 std::span<const double> y, double eps,
                                 std::size_t points = 2001) {
  const double v = toy_hmm_nc_quadrature(model, mu, y, eps, points);
  return v > 0.0 ? std::log(v) : tsabc::kNegInf;
}

inline bool traces_equal(const tsabc::Trace& a, const tsabc::Trace& b) {
  return a.draws == b.draws && a.accepted == b.accepted && a.extras == b.extras &&
         a.cap_events == b.cap_events;
}

}  // namespace testutil
