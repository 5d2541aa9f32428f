#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsabc/abc.hpp"
#include "tsabc/errors.hpp"
#include "tsabc/kernels.hpp"
#include "tsabc/models.hpp"
#include "tsabc/rng.hpp"

namespace tsabc {

// MCMC output: one row per iteration plus acceptance bookkeeping and an
// optional per-iteration scalar channel (total trial count, log normalizing
// constant, ...).
struct Trace {
  std::vector<std::string> param_names;
  std::size_t iterations = 0;
  std::size_t dim = 0;
  std::vector<double> draws;  // iterations x dim, row-major
  std::vector<std::uint8_t> accepted;
  std::string extra_name;  // empty when the channel is unused
  std::vector<double> extras;
  std::size_t cap_events = 0;  // proposals abandoned because a trial cap ran out

  double acceptance_rate() const;
  std::vector<double> column(std::size_t j) const;
  double draw(std::size_t it, std::size_t j) const { return draws[it * dim + j]; }
};

// Starting-state policy shared by the chain kernels: theta comes from the
// prior (or is given), then the auxiliary coordinates are completed by
// sampling until every datum hits, bounded by `cap` trials per datum and
// `max_retries` fresh theta draws.
struct InitOptions {
  std::optional<std::vector<double>> theta0;
  int max_retries = 100;
  long long cap = 10'000'000;
};

// Per-datum hit probabilities alpha_i = P(simulated datum lands in the ball
// around y_i) at a fixed parameter, estimated with n_trials draws per datum.
// Small values flag the regions where hit-based chains get stuck.
struct HitProbability {
  std::vector<double> alpha;  // one estimate per datum, each in [0,1]
};

HitProbability estimate_hit_probabilities(const FactorizedLaw& law, const AbcKernel& kernel,
                                          const ParameterVector& theta, std::uint32_t n_trials,
                                          RngStream& rng, int threads = 1);

// Total smoothed ABC log likelihood of the bound law over the series:
// analytic per-datum factors when the law carries them, else quadrature of
// the pointwise density over each ball (points/rule as given).
double abc_loglik_analytic(const BoundLaw& bound, const ObservationSeries& y, double eps);
double abc_loglik_quadrature(const BoundLaw& bound, const ObservationSeries& y, double eps,
                             std::size_t points, QuadratureRule rule = QuadratureRule::simpson);

// ----------------------------------------------------------------------------
// Marginal Metropolis-Hastings on theta with the smoothed likelihood
// evaluated exactly (oracle models only).
// ----------------------------------------------------------------------------
class MarginalMh {
 public:
  struct State {
    ParameterVector theta;
    double log_prior = 0.0;
    double log_lik = 0.0;
  };

  // quad_points == 0 demands the analytic smoothed likelihood; otherwise a
  // pointwise density plus quadrature with that many points is accepted too.
  MarginalMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel, Proposal proposal,
             std::size_t quad_points = 0);

  State init(InitOptions opts, RngStream& rng) const;
  bool step(State& s, RngStream& rng) const;

 private:
  double loglik(const BoundLaw& bound) const;
  const FactorizedLaw& law_;
  const Model& model_;
  AbcKernel kernel_;
  Proposal proposal_;
  std::size_t quad_points_;
};

// ----------------------------------------------------------------------------
// Basic ABC MCMC: one auxiliary series, all-hit acceptance. With early_reject
// the proposal simulation stops at the first miss; decisions are unchanged
// because every datum owns its own substream.
// ----------------------------------------------------------------------------
class NaiveAbcMh {
 public:
  struct State {
    ParameterVector theta;
    double log_prior = 0.0;
    std::vector<double> u;
  };

  NaiveAbcMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel, Proposal proposal,
             bool early_reject = false, int threads = 1);

  State init(InitOptions opts, RngStream& rng) const;
  bool step(State& s, RngStream& rng) const;

 private:
  const FactorizedLaw& law_;
  const Model& model_;
  AbcKernel kernel_;
  Proposal proposal_;
  bool early_reject_;
  int threads_;
};

// ----------------------------------------------------------------------------
// ABC MCMC with N trials per datum; only the per-datum hit counts are kept
// (they are sufficient for the acceptance ratio).
// ----------------------------------------------------------------------------
class NTrialsMh {
 public:
  struct State {
    ParameterVector theta;
    double log_prior = 0.0;
    std::vector<std::uint32_t> counts;
  };

  NTrialsMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel, Proposal proposal,
            std::uint32_t n_trials, int threads = 1);

  State init(InitOptions opts, RngStream& rng) const;
  bool step(State& s, RngStream& rng) const;
  std::uint32_t n_trials() const { return n_trials_; }

 private:
  const FactorizedLaw& law_;
  const Model& model_;
  AbcKernel kernel_;
  Proposal proposal_;
  std::uint32_t n_trials_;
  int threads_;
};

// ----------------------------------------------------------------------------
// ABC MCMC with a random number of trials: per datum, simulate until N hits
// and carry the trial counts m_i >= N. A proposal whose cap runs out is
// abandoned and counted as a rejection (flagged through `last_step_capped`
// into Trace::cap_events).
// ----------------------------------------------------------------------------
class NHitMh {
 public:
  struct State {
    ParameterVector theta;
    double log_prior = 0.0;
    std::vector<long long> m;
  };

  NHitMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel, Proposal proposal,
         std::uint32_t n_hits, long long cap = 10'000'000, int threads = 1);

  State init(InitOptions opts, RngStream& rng) const;
  bool step(State& s, RngStream& rng) const;

  double extra(const State& s) const;  // total trial count of the current state
  const char* extra_name() const { return "sum_m"; }
  bool last_step_capped() const { return last_capped_; }

 private:
  const FactorizedLaw& law_;
  const Model& model_;
  AbcKernel kernel_;
  Proposal proposal_;
  std::uint32_t n_hits_;
  long long cap_;
  int threads_;
  mutable bool last_capped_ = false;
};

// ----------------------------------------------------------------------------
// Collapsed-representation MCMC on (theta, phi_{1:n}): the target is written
// over the driving noise, so it is evaluable pointwise whenever the noise
// density is known, without ever simulating data. Each step makes a theta
// move holding phi fixed (indicators re-checked under the proposed theta),
// then, when enabled, an independence refresh of each phi_i accepted iff the
// induced observation still hits.
// ----------------------------------------------------------------------------
class CollapsedMh {
 public:
  struct State {
    ParameterVector theta;
    double log_prior = 0.0;
    CollapsedState noise;  // obs_noise holds phi_{1:n}; no latent stream here
  };

  CollapsedMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel, Proposal proposal,
              bool refresh_noise = true, int threads = 1);

  State init(InitOptions opts, RngStream& rng) const;
  bool step(State& s, RngStream& rng) const;  // reports the theta move

 private:
  const FactorizedLaw& law_;
  const Model& model_;
  AbcKernel kernel_;
  Proposal proposal_;
  bool refresh_noise_;
  int threads_;
};

// ----------------------------------------------------------------------------
// Chain driver: applies the kernel `iterations` times from the given state,
// recording draws, acceptances and the kernel's extra channel when it has one.
// ----------------------------------------------------------------------------
template <class Kernel>
Trace run_chain(const Kernel& kernel, typename Kernel::State state, std::size_t iterations,
                RngStream& rng) {
  if (iterations < 1) throw std::invalid_argument("run_chain: iterations must be >= 1");
  constexpr bool has_extra = requires(const Kernel& k, const typename Kernel::State& s) {
    k.extra(s);
    k.extra_name();
  };
  constexpr bool has_cap = requires(const Kernel& k) { k.last_step_capped(); };

  Trace trace;
  trace.param_names = state.theta.names;
  trace.dim = state.theta.dim();
  trace.iterations = iterations;
  trace.draws.resize(iterations * trace.dim);
  trace.accepted.resize(iterations);
  if constexpr (has_extra) {
    trace.extra_name = kernel.extra_name();
    trace.extras.resize(iterations);
  }
  for (std::size_t t = 0; t < iterations; ++t) {
    const bool acc = kernel.step(state, rng);
    trace.accepted[t] = acc ? 1 : 0;
    for (std::size_t j = 0; j < trace.dim; ++j) trace.draws[t * trace.dim + j] = state.theta[j];
    if constexpr (has_extra) trace.extras[t] = kernel.extra(state);
    if constexpr (has_cap) {
      if (kernel.last_step_capped()) ++trace.cap_events;
    }
  }
  return trace;
}

}  // namespace tsabc
