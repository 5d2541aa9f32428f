#include "tsabc/distributions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tsabc {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))
}  // namespace

void StableParams::validate() const {
  if (!(alpha > 0.0) || !(alpha <= 2.0)) throw std::domain_error("stable: alpha must lie in (0,2]");
  if (!(beta_skew >= -1.0) || !(beta_skew <= 1.0))
    throw std::domain_error("stable: beta_skew must lie in [-1,1]");
  if (!(scale > 0.0)) throw std::domain_error("stable: scale must be positive");
  if (!std::isfinite(location)) throw std::domain_error("stable: location must be finite");
}

double sample_gaussian(RngStream& rng, double mean, double sd) {
  if (!(sd > 0.0)) throw std::domain_error("sample_gaussian: sd must be positive");
  // Box-Muller, cosine branch only. Two uniforms per draw; no cached state,
  // so streams stay value-copyable.
  const double u1 = rng.uniform_pos();
  const double u2 = rng.uniform();
  return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

namespace {

// Marsaglia-Tsang squeeze for shape >= 1, unit rate.
double gamma_unit_rate(RngStream& rng, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_gaussian(rng, 0.0, 1.0);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_gamma(RngStream& rng, double shape, double rate) {
  if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape must be positive");
  if (!(rate > 0.0)) throw std::domain_error("sample_gamma: rate must be positive");
  if (shape < 1.0) {
    // Boost: X ~ Ga(shape+1), U^(1/shape) * X ~ Ga(shape).
    const double g = gamma_unit_rate(rng, shape + 1.0);
    const double u = rng.uniform_pos();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  return gamma_unit_rate(rng, shape) / rate;
}

double sample_inverse_gamma(RngStream& rng, double shape, double scale) {
  if (!(shape > 0.0)) throw std::domain_error("sample_inverse_gamma: shape must be positive");
  if (!(scale > 0.0)) throw std::domain_error("sample_inverse_gamma: scale must be positive");
  return 1.0 / sample_gamma(rng, shape, scale);
}

double sample_stable(RngStream& rng, const StableParams& p) {
  p.validate();
  const double u = kPi * (rng.uniform_pos() - 0.5);  // Uniform(-pi/2, pi/2), open
  const double w = -std::log(rng.uniform_pos());     // Exp(1)
  const double alpha = p.alpha;
  const double beta = p.beta_skew;
  if (alpha != 1.0) {
    const double zeta = beta * std::tan(kPi * alpha / 2.0);
    const double b = std::atan(zeta) / alpha;
    const double s = std::pow(1.0 + zeta * zeta, 0.5 / alpha);
    const double z = s * std::sin(alpha * (u + b)) / std::pow(std::cos(u), 1.0 / alpha) *
                     std::pow(std::cos(u - alpha * (u + b)) / w, (1.0 - alpha) / alpha);
    return p.location + p.scale * z;
  }
  const double t = kPi / 2.0 + beta * u;
  const double z =
      (2.0 / kPi) * (t * std::tan(u) - beta * std::log((kPi / 2.0) * w * std::cos(u) / t));
  return p.location + p.scale * z + (2.0 / kPi) * beta * p.scale * std::log(p.scale);
}

double sample_uniform_ball1(RngStream& rng, double center, double eps) {
  if (!(eps > 0.0)) throw std::domain_error("sample_uniform_ball: eps must be positive");
  // uniform_pos keeps the interval open on both ends.
  return center + eps * (2.0 * rng.uniform_pos() - 1.0);
}

std::vector<double> sample_uniform_ball(RngStream& rng, std::span<const double> center,
                                        double eps) {
  if (!(eps > 0.0)) throw std::domain_error("sample_uniform_ball: eps must be positive");
  if (center.empty()) throw std::domain_error("sample_uniform_ball: dimension must be >= 1");
  std::vector<double> z(center.size());
  if (center.size() == 1) {
    z[0] = sample_uniform_ball1(rng, center[0], eps);
    return z;
  }
  // Rejection from the bounding cube; acceptance odds are fine for the small
  // dimensions this library ships.
  for (;;) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < center.size(); ++j) {
      const double d = eps * (2.0 * rng.uniform() - 1.0);
      z[j] = center[j] + d;
      r2 += d * d;
    }
    if (r2 < eps * eps) return z;
  }
}

double normal_logpdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_cdf_diff(double a, double b) {
  if (a > b) return -normal_cdf_diff(b, a);
  if (a >= 0.0) return 0.5 * (std::erfc(a / kSqrt2) - std::erfc(b / kSqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b / kSqrt2) - std::erfc(-a / kSqrt2));
  return normal_cdf(b) - normal_cdf(a);
}

double gamma_logpdf(double x, double shape, double rate) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double inverse_gamma_logpdf(double x, double shape, double scale) {
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(x) - scale / x;
}

}  // namespace tsabc
