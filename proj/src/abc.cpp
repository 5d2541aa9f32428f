#include "tsabc/abc.hpp"

#include <cmath>
#include <stdexcept>

#include "tsabc/distributions.hpp"
#include "tsabc/types.hpp"

namespace tsabc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double log_ball_volume(std::size_t dim, double eps) {
  if (dim < 1) throw std::domain_error("ball_volume: dim must be >= 1");
  if (!(eps > 0.0)) throw std::domain_error("ball_volume: eps must be positive");
  const double d = static_cast<double>(dim);
  return 0.5 * d * std::log(kPi) + d * std::log(eps) - std::lgamma(0.5 * d + 1.0);
}

double ball_volume(std::size_t dim, double eps) { return std::exp(log_ball_volume(dim, eps)); }

AbcKernel::AbcKernel(double eps_, std::size_t dim_)
    : eps(eps_), dim(dim_), log_volume(log_ball_volume(dim_, eps_)) {}

bool AbcKernel::hit(std::span<const double> u, std::span<const double> y) const {
  if (u.size() != dim || y.size() != dim)
    throw std::invalid_argument("AbcKernel::hit: dimension mismatch");
  double r2 = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = u[j] - y[j];
    r2 += d * d;
  }
  return r2 < eps * eps;
}

QuadratureGrid::QuadratureGrid(double lower_, double upper_, std::size_t points_,
                               QuadratureRule rule_)
    : lower(lower_), upper(upper_), points(points_), rule(rule_) {
  if (!(lower < upper)) throw std::domain_error("QuadratureGrid: lower must be below upper");
  if (points < 2) throw std::domain_error("QuadratureGrid: need at least 2 points");
}

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 std::size_t points, QuadratureRule rule) {
  if (!(lower < upper)) throw std::domain_error("integrate: lower must be below upper");
  if (points < 2) throw std::domain_error("integrate: need at least 2 points");
  if (rule == QuadratureRule::midpoint) {
    const double h = (upper - lower) / static_cast<double>(points);
    double acc = 0.0;
    for (std::size_t i = 0; i < points; ++i)
      acc += f(lower + (static_cast<double>(i) + 0.5) * h);
    return acc * h;
  }
  // Composite Simpson needs an even interval count; round the point count up
  // to the next odd value.
  std::size_t pts = points | 1;
  if (pts < 3) pts = 3;
  const std::size_t intervals = pts - 1;
  const double h = (upper - lower) / static_cast<double>(intervals);
  double acc = f(lower) + f(upper);
  for (std::size_t i = 1; i < intervals; ++i) {
    const double x = lower + static_cast<double>(i) * h;
    acc += (i % 2 == 1 ? 4.0 : 2.0) * f(x);
  }
  return acc * h / 3.0;
}

double integrate(const std::function<double(double)>& f, const QuadratureGrid& grid) {
  return integrate(f, grid.lower, grid.upper, grid.points, grid.rule);
}

double smoothed_gaussian_loglik(double mean, double sd, double y, double eps) {
  if (!(sd > 0.0)) throw std::domain_error("smoothed_gaussian_loglik: sd must be positive");
  if (!(eps > 0.0)) throw std::domain_error("smoothed_gaussian_loglik: eps must be positive");
  const double lo = (y - mean - eps) / sd;
  const double hi = (y - mean + eps) / sd;
  const double mass = normal_cdf_diff(lo, hi);
  if (mass <= 0.0) return kNegInf;
  return std::log(mass) - std::log(2.0 * eps);
}

double smoothed_loglik_quadrature(const std::function<double(double)>& density, double y,
                                  double eps, std::size_t points, QuadratureRule rule) {
  if (!(eps > 0.0)) throw std::domain_error("smoothed_loglik_quadrature: eps must be positive");
  const double mass = integrate(density, y - eps, y + eps, points, rule);
  if (mass <= 0.0) return kNegInf;
  return std::log(mass) - std::log(2.0 * eps);
}

ThetaStarResult theta_star_eps(const std::function<double(double, double)>& smoothed_loglik,
                               const std::function<double(double)>& true_density,
                               std::span<const double> theta_grid, const QuadratureGrid& y_grid) {
  if (theta_grid.size() < 2) throw std::domain_error("theta_star_eps: grid too small");
  ThetaStarResult best;
  double best_obj = kNegInf;
  std::size_t best_idx = 0;
  for (std::size_t k = 0; k < theta_grid.size(); ++k) {
    const double theta = theta_grid[k];
    const double obj = integrate(
        [&](double y) { return smoothed_loglik(theta, y) * true_density(y); }, y_grid);
    if (obj > best_obj) {
      best_obj = obj;
      best_idx = k;
    }
  }
  best.value = theta_grid[best_idx];
  best.boundary_warning = (best_idx == 0 || best_idx + 1 == theta_grid.size());
  return best;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::domain_error("linspace: need at least 2 points");
  std::vector<double> g(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * h;
  g.back() = hi;
  return g;
}

}  // namespace tsabc
