#pragma once

#include <functional>
#include <span>
#include <vector>

namespace tsabc {

// Lebesgue measure of the Euclidean eps-ball in `dim` dimensions.
double ball_volume(std::size_t dim, double eps);
double log_ball_volume(std::size_t dim, double eps);

// The epsilon-ball acceptance kernel: tolerance, dimension, Euclidean
// distance, and the cached log ball volume entering every per-datum
// normalizer.
struct AbcKernel {
  double eps = 1.0;
  std::size_t dim = 1;
  double log_volume = 0.0;

  AbcKernel() : AbcKernel(1.0, 1) {}
  AbcKernel(double eps_, std::size_t dim_ = 1);

  // True iff the Euclidean distance is strictly below eps (open ball; the
  // boundary has measure zero but the indicator set is open).
  bool hit(std::span<const double> u, std::span<const double> y) const;
  bool hit1(double u, double y) const { return std::abs(u - y) < eps; }
};

// --- quadrature -------------------------------------------------------------

enum class QuadratureRule { midpoint, simpson };

struct QuadratureGrid {
  double lower = 0.0;
  double upper = 1.0;
  std::size_t points = 2;  // >= 2; simpson rounds up to an odd count internally
  QuadratureRule rule = QuadratureRule::simpson;

  QuadratureGrid() = default;
  QuadratureGrid(double lower_, double upper_, std::size_t points_,
                 QuadratureRule rule_ = QuadratureRule::simpson);
};

double integrate(const std::function<double(double)>& f, const QuadratureGrid& grid);
double integrate(const std::function<double(double)>& f, double lower, double upper,
                 std::size_t points, QuadratureRule rule = QuadratureRule::simpson);

// --- smoothed (ABC) likelihood evaluations ----------------------------------

// Exact log of the eps-smoothed Gaussian density at y for a Normal(mean, sd^2)
// observation law:  log[ (Phi((y-mean+eps)/sd) - Phi((y-mean-eps)/sd)) / (2 eps) ].
double smoothed_gaussian_loglik(double mean, double sd, double y, double eps);

// Quadrature evaluation of one smoothed log factor,
// log[ (1/2 eps) * Integral_{y-eps}^{y+eps} density(u) du ],
// for a scalar observation law with pointwise-evaluable density.
double smoothed_loglik_quadrature(const std::function<double(double)>& density, double y,
                                  double eps, std::size_t points,
                                  QuadratureRule rule = QuadratureRule::simpson);

// --- maximum-likelihood oracles ---------------------------------------------

struct ThetaStarResult {
  double value = 0.0;
  bool boundary_warning = false;  // argmax landed on a grid end: enlarge the grid
};

// Grid argmax over theta of  Integral log(p_theta^eps(y)) p_true(y) dy,
// the point the plain ABC maximum-likelihood estimate converges to.
// `smoothed_loglik(theta, y)` evaluates log p_theta^eps(y); `true_density(y)`
// is the data-generating density; the outer integral runs on `y_grid`.
ThetaStarResult theta_star_eps(const std::function<double(double, double)>& smoothed_loglik,
                               const std::function<double(double)>& true_density,
                               std::span<const double> theta_grid, const QuadratureGrid& y_grid);

// Evenly spaced closed grid, n >= 2 points.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace tsabc
