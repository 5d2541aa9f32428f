#include "tsabc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tsabc/distributions.hpp"

namespace tsabc {

namespace {
double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}
}  // namespace

AcfResult autocorrelation(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (max_lag < 1) throw std::invalid_argument("autocorrelation: max_lag must be >= 1");
  if (n <= max_lag) throw std::invalid_argument("autocorrelation: need n > max_lag");
  const double m = mean_of(series);
  double c0 = 0.0;
  for (double v : series) c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) throw std::invalid_argument("autocorrelation: constant series");
  AcfResult res;
  res.n = n;
  res.acf.resize(max_lag + 1);
  res.acf[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) ck += (series[i] - m) * (series[i + k] - m);
    ck /= static_cast<double>(n);  // biased normalization, same divisor as c0
    res.acf[k] = ck / c0;
  }
  return res;
}

double ess(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n < 2) throw std::invalid_argument("ess: need at least 2 samples");
  max_lag = std::min(max_lag, n - 1);
  const double m = mean_of(series);
  double c0 = 0.0;
  for (double v : series) c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) throw std::invalid_argument("ess: constant series");
  // Lags computed one at a time so the truncation actually saves the work.
  double s = 0.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) ck += (series[i] - m) * (series[i + k] - m);
    ck /= static_cast<double>(n);
    const double rho = ck / c0;
    if (rho <= 0.0) break;
    s += rho;
  }
  return static_cast<double>(n) / (1.0 + 2.0 * s);
}

double ess(std::span<const double> series) {
  const std::size_t n = series.size();
  const std::size_t max_lag = std::min<std::size_t>(n - 1, std::max<std::size_t>(50, n / 10));
  return ess(series, max_lag);
}

double silverman_bandwidth(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("silverman_bandwidth: need at least 2 samples");
  const double m = mean_of(samples);
  double var = 0.0;
  for (double v : samples) var += (v - m) * (v - m);
  var /= static_cast<double>(n - 1);
  const double sd = std::sqrt(var);
  const double iqr = quantile(samples, 0.75) - quantile(samples, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) throw std::invalid_argument("silverman_bandwidth: degenerate sample");
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

DensityEstimate kde(std::span<const double> samples, std::vector<double> grid, double bandwidth,
                    bool allow_single) {
  if (!(bandwidth > 0.0)) throw std::domain_error("kde: bandwidth must be positive");
  if (samples.size() < 2 && !allow_single)
    throw std::invalid_argument("kde: need at least 2 samples");
  if (samples.empty()) throw std::invalid_argument("kde: empty sample");
  DensityEstimate est;
  est.bandwidth = bandwidth;
  est.density.resize(grid.size());
  const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double s : samples) {
      const double z = (grid[g] - s) / bandwidth;
      acc += std::exp(-0.5 * z * z);
    }
    est.density[g] = acc * norm / std::sqrt(2.0 * 3.14159265358979323846);
  }
  est.grid = std::move(grid);
  return est;
}

DensityEstimate kde_silverman(std::span<const double> samples, std::vector<double> grid) {
  return kde(samples, std::move(grid), silverman_bandwidth(samples));
}

double quantile(std::span<const double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::domain_error("quantile: q must lie in [0,1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

TraceSummary summarize(const Trace& trace) {
  if (trace.iterations == 0) throw std::invalid_argument("summarize: empty trace");
  TraceSummary s;
  s.iterations = trace.iterations;
  s.acceptance_rate = trace.acceptance_rate();
  s.cap_events = trace.cap_events;
  for (std::size_t j = 0; j < trace.dim; ++j) {
    const auto col = trace.column(j);
    ParamSummary p;
    p.name = trace.param_names[j];
    p.mean = mean_of(col);
    double var = 0.0;
    for (double v : col) var += (v - p.mean) * (v - p.mean);
    p.sd = trace.iterations > 1 ? std::sqrt(var / static_cast<double>(trace.iterations - 1)) : 0.0;
    p.q05 = quantile(col, 0.05);
    p.q50 = quantile(col, 0.50);
    p.q95 = quantile(col, 0.95);
    // A frozen chain has no spectrum to estimate; report 0 rather than fail.
    bool constant = true;
    for (double v : col)
      if (v != col.front()) {
        constant = false;
        break;
      }
    p.ess = constant ? 0.0 : ess(std::span<const double>(col));
    s.params.push_back(std::move(p));
  }
  return s;
}

}  // namespace tsabc
