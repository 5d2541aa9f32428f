#pragma once

#include <span>
#include <vector>

#include "tsabc/rng.hpp"

namespace tsabc {

// Parameters of the alpha-stable law S(alpha, beta_skew; scale, location),
// stored in the canonical order (alpha, beta_skew, scale, location)
// regardless of how a concrete model orders its own constants.
struct StableParams {
  double alpha = 2.0;      // stability index, in (0,2]
  double beta_skew = 0.0;  // skewness, in [-1,1]
  double scale = 1.0;      // > 0
  double location = 0.0;

  void validate() const;  // throws std::domain_error
};

// --- samplers ---------------------------------------------------------------

double sample_gaussian(RngStream& rng, double mean, double sd);

// Gamma(shape, rate), mean shape/rate. Shapes below 1 are handled by the
// shape+1 boost with a power transform.
double sample_gamma(RngStream& rng, double shape, double rate);

// Inverse gamma with density proportional to x^{-shape-1} exp(-scale/x);
// mode scale/(shape+1). Note shape <= 2 has infinite variance.
double sample_inverse_gamma(RngStream& rng, double shape, double scale);

// Alpha-stable draw via the Chambers-Mallows-Stuck transform of one uniform
// and one exponential variate. Parameterization is the "type 1" convention
// (Samorodnitsky-Taqqu S(alpha, beta; scale, location)): for alpha != 1 the
// returned value is location + scale * Z with Z standard; for alpha == 1 the
// beta-dependent scale correction (2/pi) * beta * scale * log(scale) is
// applied. alpha = 2 reduces to Normal(location, 2 * scale^2).
double sample_stable(RngStream& rng, const StableParams& p);

// Uniform draw on the open Euclidean eps-ball around `center`. dim 1 uses the
// open interval directly; dim >= 2 uses rejection from the bounding cube.
// Draws are strictly inside the ball (open set).
std::vector<double> sample_uniform_ball(RngStream& rng, std::span<const double> center, double eps);
double sample_uniform_ball1(RngStream& rng, double center, double eps);

// --- densities & cdfs (used by priors, proposals and test oracles) ----------

double normal_logpdf(double x, double mean, double sd);
double normal_cdf(double x);
// Phi(b) - Phi(a), evaluated via erfc on whichever tail keeps precision.
double normal_cdf_diff(double a, double b);

double gamma_logpdf(double x, double shape, double rate);
double inverse_gamma_logpdf(double x, double shape, double scale);

}  // namespace tsabc
