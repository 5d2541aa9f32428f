#pragma once

#include <span>
#include <string>
#include <vector>

#include "tsabc/mcmc.hpp"

namespace tsabc {

struct AcfResult {
  std::vector<double> acf;  // lag 0..max_lag; acf[0] == 1
  std::size_t n = 0;
};

struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
};

// Autocorrelation with the biased (divisor n) normalization rho(k) = c_k/c_0,
// covariances about the sample mean. Errors on a constant series.
AcfResult autocorrelation(std::span<const double> series, std::size_t max_lag);

// Effective sample size n / (1 + 2 sum rho(k)), summing lags until the first
// non-positive autocorrelation (initial positive sequence truncation).
double ess(std::span<const double> series);
double ess(std::span<const double> series, std::size_t max_lag);

// Gaussian-kernel density estimate on the given grid. `allow_single` relaxes
// the two-sample minimum for the fixed-bandwidth, one-point case.
DensityEstimate kde(std::span<const double> samples, std::vector<double> grid, double bandwidth,
                    bool allow_single = false);
// Silverman bandwidth: 0.9 * min(sd, IQR/1.34) * n^(-1/5).
double silverman_bandwidth(std::span<const double> samples);
DensityEstimate kde_silverman(std::span<const double> samples, std::vector<double> grid);

// Linear-interpolation sample quantile, q in [0,1].
double quantile(std::span<const double> samples, double q);

struct ParamSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double q05 = 0.0;
  double q50 = 0.0;
  double q95 = 0.0;
  double ess = 0.0;
};

struct TraceSummary {
  std::vector<ParamSummary> params;
  double acceptance_rate = 0.0;
  std::size_t iterations = 0;
  std::size_t cap_events = 0;
};

TraceSummary summarize(const Trace& trace);

}  // namespace tsabc
