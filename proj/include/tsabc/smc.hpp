#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tsabc/abc.hpp"
#include "tsabc/models.hpp"
#include "tsabc/rng.hpp"
#include "tsabc/types.hpp"

namespace tsabc {

// Weighted latent-state particles at one time step.
struct ParticleSystem {
  std::vector<double> x;  // latent states
  std::vector<double> u;  // auxiliary observations
  std::vector<double> w;  // non-negative weights
  std::size_t t = 0;

  std::size_t size() const { return x.size(); }
  double weight_sum() const;
  bool collapsed() const { return weight_sum() <= 0.0; }
};

// Normalizing-constant estimate accumulated by a filter run. A collapsed
// standard-SMC run carries log_value = -inf and the collapse step; the alive
// filter never collapses and additionally records the per-step trial counts.
struct NcEstimate {
  double log_value = 0.0;
  std::vector<double> per_step_log_factors;
  std::optional<std::size_t> collapsed_at;
  std::vector<long long> trial_counts;  // alive filter only
};

struct StepRecord {
  double log_factor = 0.0;
  double ess = 0.0;       // (sum w)^2 / sum w^2 of the step's particle weights
  std::size_t hits = 0;   // particles with positive weight
  long long trials = 0;   // attempts this step (alive); particle count (standard)
};

struct FilterResult {
  ParticleSystem particles;
  NcEstimate nc;
  std::vector<StepRecord> history;
  bool cap_failed = false;       // alive filter ran out of attempts (distinct from collapse)
  std::size_t cap_failed_at = 0;
};

// Latent proposal q_theta; when absent the filters run bootstrap (propagate
// with the model transition, weights reduce to the hit indicator). A custom
// proposal requires an evaluable transition density for the weight ratio.
struct LatentProposal {
  std::function<double(const ParameterVector&, double x_prev, std::size_t step, RngStream&)>
      sample;
  std::function<double(const ParameterVector&, double x_prev, double x, std::size_t step)>
      log_density;
};

enum class Resampling { multinomial, systematic };

struct FilterOptions {
  std::size_t particles = 100;
  AbcKernel kernel;
  std::optional<LatentProposal> proposal;  // empty: bootstrap
  Resampling resampling = Resampling::multinomial;
  long long cap = 10'000'000;  // alive: max attempts per step
  int threads = 1;
};

// Multinomial resampling; weights reset to 1. Returns nullopt on an all-zero
// weight vector (collapse is data, not an exception).
std::optional<ParticleSystem> resample_multinomial(const ParticleSystem& ps, RngStream& rng);
// Systematic resampling (one stratified uniform). Offered behind the
// Resampling flag; the normalizing-constant unbiasedness checks in the test
// suite cover the multinomial scheme.
std::optional<ParticleSystem> resample_systematic(const ParticleSystem& ps, RngStream& rng);

// Self-normalized weighted average of xi(x, u); errors on a collapsed system.
double filter_expectation(const ParticleSystem& ps,
                          const std::function<double(double, double)>& xi);

// Standard ABC particle filter: propagate, weight by indicator times
// transition/proposal ratio, resample every step. Collapse (all weights zero)
// halts the run and is reported through the estimate, not thrown.
FilterResult smc_abc_filter(const HmmModel& model, const ParameterVector& theta,
                            const ObservationSeries& y, const FilterOptions& opts,
                            RngStream& rng);

// Alive ABC particle filter: per step, resample/propagate/weight until N
// attempts have positive weight, keep the first N-1 of them (attempt order),
// and record the attempt count m_t. Ancestors are picked by weight among the
// alive particles; with the bootstrap proposal the alive weights are all 1,
// so that pick is uniform. Cannot collapse; a step exceeding the cap yields a
// flagged failure result carrying the counts so far.
FilterResult alive_smc_filter(const HmmModel& model, const ParameterVector& theta,
                              const ObservationSeries& y, const FilterOptions& opts,
                              RngStream& rng);

}  // namespace tsabc
