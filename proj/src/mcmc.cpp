#include "tsabc/mcmc.hpp"

#include <cmath>
#include <numeric>

namespace tsabc {

double Trace::acceptance_rate() const {
  if (iterations == 0) return 0.0;
  const double acc = std::accumulate(accepted.begin(), accepted.end(), 0.0);
  return acc / static_cast<double>(iterations);
}

std::vector<double> Trace::column(std::size_t j) const {
  std::vector<double> col(iterations);
  for (std::size_t t = 0; t < iterations; ++t) col[t] = draws[t * dim + j];
  return col;
}

HitProbability estimate_hit_probabilities(const FactorizedLaw& law, const AbcKernel& kernel,
                                          const ParameterVector& theta, std::uint32_t n_trials,
                                          RngStream& rng, int threads) {
  if (n_trials < 1)
    throw std::invalid_argument("estimate_hit_probabilities: n_trials must be >= 1");
  const auto bound = law.bind(theta);
  const auto counts = count_hits(*bound, law.data(), kernel, n_trials, rng.spawn(), threads);
  HitProbability out;
  out.alpha.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    out.alpha[i] = static_cast<double>(counts[i]) / static_cast<double>(n_trials);
  return out;
}

double abc_loglik_analytic(const BoundLaw& bound, const ObservationSeries& y, double eps) {
  if (!bound.has_smoothed_loglik())
    throw CapabilityError("abc_loglik_analytic: law has no analytic smoothed likelihood");
  double acc = 0.0;
  for (std::size_t i = 0; i < bound.size(); ++i) acc += bound.smoothed_loglik(i, eps);
  (void)y;
  return acc;
}

double abc_loglik_quadrature(const BoundLaw& bound, const ObservationSeries& y, double eps,
                             std::size_t points, QuadratureRule rule) {
  if (!bound.has_log_density())
    throw CapabilityError("abc_loglik_quadrature: law has no pointwise density");
  double acc = 0.0;
  for (std::size_t i = 0; i < bound.size(); ++i) {
    acc += smoothed_loglik_quadrature(
        [&](double u) { return std::exp(bound.log_density(i, u)); }, y.scalar(i), eps, points,
        rule);
  }
  return acc;
}

namespace {

// Accept/reject decision given the log Hastings ratio. By convention the
// acceptance uniform is drawn only here: all the sure-rejection paths (prior
// outside support, missed indicator, zero hit count, cap exhaustion)
// short-circuit before consuming it.
bool mh_accept(double log_ratio, RngStream& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) {
    rng.uniform_pos();  // keep consumption identical across branches
    return true;
  }
  return std::log(rng.uniform_pos()) < log_ratio;
}

// Fresh starting point per attempt: a supplied theta0 is reused (the random
// auxiliary completion is what gets retried), otherwise the prior is redrawn.
ParameterVector draw_initial_theta(const Model& model, const InitOptions& opts, RngStream& rng) {
  if (opts.theta0) {
    auto theta = model.params_from_values(*opts.theta0);
    if (model.log_prior(theta) == kNegInf)
      throw InitError("chain init: supplied theta has zero prior density");
    return theta;
  }
  return model.sample_prior(rng);
}

// Per-datum sample-until-hit completion of an auxiliary series; nullopt when
// some datum exhausts the cap.
std::optional<std::vector<double>> hitting_series(const BoundLaw& bound,
                                                  const ObservationSeries& y,
                                                  const AbcKernel& kernel, long long cap,
                                                  const RngStream& block) {
  std::vector<double> u(bound.size());
  for (std::size_t i = 0; i < bound.size(); ++i) {
    RngStream rng = block.substream(i);
    long long attempts = 0;
    for (;;) {
      if (++attempts > cap) return std::nullopt;
      u[i] = bound.simulate(i, rng);
      if (kernel.hit1(u[i], y.scalar(i))) break;
    }
  }
  return u;
}

[[noreturn]] void init_failed() {
  throw InitError(
      "chain init: no valid starting state found; the tolerance is likely too small for the "
      "prior-plausible parameters (raise abc.eps or the trial cap)");
}

}  // namespace

// --- MarginalMh ----------------------------------------------------------------

MarginalMh::MarginalMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel,
                       Proposal proposal, std::size_t quad_points)
    : law_(law),
      model_(model),
      kernel_(kernel),
      proposal_(std::move(proposal)),
      quad_points_(quad_points) {}

double MarginalMh::loglik(const BoundLaw& bound) const {
  if (bound.has_smoothed_loglik()) return abc_loglik_analytic(bound, law_.data(), kernel_.eps);
  if (quad_points_ > 0)
    return abc_loglik_quadrature(bound, law_.data(), kernel_.eps, quad_points_);
  throw CapabilityError("marginal MH needs an analytic smoothed likelihood or quadrature points");
}

MarginalMh::State MarginalMh::init(InitOptions opts, RngStream& rng) const {
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    ParameterVector theta = draw_initial_theta(model_, opts, rng);
    const double lp = model_.log_prior(theta);
    if (lp == kNegInf) continue;
    const double ll = loglik(*law_.bind(theta));
    if (ll == kNegInf) continue;
    return State{std::move(theta), lp, ll};
  }
  init_failed();
}

bool MarginalMh::step(State& s, RngStream& rng) const {
  auto [proposed, log_q_ratio] = proposal_.propose(s.theta, rng);
  const double lp = model_.log_prior(proposed);
  if (lp == kNegInf) return false;
  const double ll = loglik(*law_.bind(proposed));
  const double log_ratio = (ll - s.log_lik) + (lp - s.log_prior) + log_q_ratio;
  if (!mh_accept(log_ratio, rng)) return false;
  s.theta = std::move(proposed);
  s.log_prior = lp;
  s.log_lik = ll;
  return true;
}

// --- NaiveAbcMh -------------------------------------------------------------------

NaiveAbcMh::NaiveAbcMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel,
                       Proposal proposal, bool early_reject, int threads)
    : law_(law),
      model_(model),
      kernel_(kernel),
      proposal_(std::move(proposal)),
      early_reject_(early_reject),
      threads_(threads) {}

NaiveAbcMh::State NaiveAbcMh::init(InitOptions opts, RngStream& rng) const {
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    ParameterVector theta = draw_initial_theta(model_, opts, rng);
    const double lp = model_.log_prior(theta);
    if (lp == kNegInf) continue;
    auto u = hitting_series(*law_.bind(theta), law_.data(), kernel_, opts.cap, rng.spawn());
    if (!u) continue;
    return State{std::move(theta), lp, std::move(*u)};
  }
  init_failed();
}

bool NaiveAbcMh::step(State& s, RngStream& rng) const {
  auto [proposed, log_q_ratio] = proposal_.propose(s.theta, rng);
  const double lp = model_.log_prior(proposed);
  if (lp == kNegInf) return false;
  const RngStream block = rng.spawn();
  auto sim = simulate_block(*law_.bind(proposed), law_.data(), kernel_, early_reject_, block,
                            threads_);
  if (!sim.all_hit) return false;  // zero numerator: sure rejection
  const double log_ratio = (lp - s.log_prior) + log_q_ratio;
  if (!mh_accept(log_ratio, rng)) return false;
  s.theta = std::move(proposed);
  s.log_prior = lp;
  s.u = std::move(sim.u);
  return true;
}

// --- NTrialsMh -------------------------------------------------------------------

NTrialsMh::NTrialsMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel,
                     Proposal proposal, std::uint32_t n_trials, int threads)
    : law_(law),
      model_(model),
      kernel_(kernel),
      proposal_(std::move(proposal)),
      n_trials_(n_trials),
      threads_(threads) {
  if (n_trials_ < 1) throw std::domain_error("NTrialsMh: n_trials must be >= 1");
}

NTrialsMh::State NTrialsMh::init(InitOptions opts, RngStream& rng) const {
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    ParameterVector theta = draw_initial_theta(model_, opts, rng);
    const double lp = model_.log_prior(theta);
    if (lp == kNegInf) continue;
    auto bound = law_.bind(theta);
    const RngStream block = rng.spawn();
    std::vector<std::uint32_t> counts(bound->size(), 0);
    bool ok = true;
    // A valid support point needs every count >= 1; re-roll a datum's batch
    // (consuming its substream further) until it hits, bounded by the cap.
    for (std::size_t i = 0; i < bound->size() && ok; ++i) {
      RngStream di = block.substream(i);
      long long used = 0;
      std::uint32_t c = 0;
      do {
        c = 0;
        for (std::uint32_t j = 0; j < n_trials_; ++j)
          if (kernel_.hit1(bound->simulate(i, di), law_.data().scalar(i))) ++c;
        used += n_trials_;
      } while (c == 0 && used < opts.cap);
      if (c == 0) ok = false;
      counts[i] = c;
    }
    if (!ok) continue;
    return State{std::move(theta), lp, std::move(counts)};
  }
  init_failed();
}

bool NTrialsMh::step(State& s, RngStream& rng) const {
  auto [proposed, log_q_ratio] = proposal_.propose(s.theta, rng);
  const double lp = model_.log_prior(proposed);
  if (lp == kNegInf) return false;
  const RngStream block = rng.spawn();
  auto counts =
      count_hits(*law_.bind(proposed), law_.data(), kernel_, n_trials_, block, threads_);
  double log_ratio = (lp - s.log_prior) + log_q_ratio;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) return false;  // sure rejection, no acceptance draw
    log_ratio += std::log(static_cast<double>(counts[i])) -
                 std::log(static_cast<double>(s.counts[i]));
  }
  if (!mh_accept(log_ratio, rng)) return false;
  s.theta = std::move(proposed);
  s.log_prior = lp;
  s.counts = std::move(counts);
  return true;
}

// --- NHitMh -----------------------------------------------------------------------

NHitMh::NHitMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel, Proposal proposal,
               std::uint32_t n_hits, long long cap, int threads)
    : law_(law),
      model_(model),
      kernel_(kernel),
      proposal_(std::move(proposal)),
      n_hits_(n_hits),
      cap_(cap),
      threads_(threads) {
  if (n_hits_ < 2) throw std::domain_error("NHitMh: n_hits must be >= 2");
  if (cap_ < n_hits_) throw std::domain_error("NHitMh: cap must allow at least n_hits trials");
}

NHitMh::State NHitMh::init(InitOptions opts, RngStream& rng) const {
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    ParameterVector theta = draw_initial_theta(model_, opts, rng);
    const double lp = model_.log_prior(theta);
    if (lp == kNegInf) continue;
    auto trials = trials_until_hits_serial(*law_.bind(theta), law_.data(), kernel_, n_hits_,
                                           std::min(cap_, opts.cap), rng.spawn());
    if (trials.capped) continue;
    return State{std::move(theta), lp, std::move(trials.m)};
  }
  init_failed();
}

bool NHitMh::step(State& s, RngStream& rng) const {
  last_capped_ = false;
  auto [proposed, log_q_ratio] = proposal_.propose(s.theta, rng);
  const double lp = model_.log_prior(proposed);
  if (lp == kNegInf) return false;
  const RngStream block = rng.spawn();
  auto trials =
      trials_until_hits(*law_.bind(proposed), law_.data(), kernel_, n_hits_, cap_, block,
                        threads_);
  if (trials.capped) {
    last_capped_ = true;  // abandoned proposal, counted as a rejection
    return false;
  }
  double log_ratio = (lp - s.log_prior) + log_q_ratio;
  for (std::size_t i = 0; i < trials.m.size(); ++i)
    log_ratio += std::log(static_cast<double>(s.m[i] - 1)) -
                 std::log(static_cast<double>(trials.m[i] - 1));
  if (!mh_accept(log_ratio, rng)) return false;
  s.theta = std::move(proposed);
  s.log_prior = lp;
  s.m = std::move(trials.m);
  return true;
}

double NHitMh::extra(const State& s) const {
  return std::accumulate(s.m.begin(), s.m.end(), 0.0);
}

// --- CollapsedMh ---------------------------------------------------------------------

CollapsedMh::CollapsedMh(const FactorizedLaw& law, const Model& model, AbcKernel kernel,
                         Proposal proposal, bool refresh_noise, int threads)
    : law_(law),
      model_(model),
      kernel_(kernel),
      proposal_(std::move(proposal)),
      refresh_noise_(refresh_noise),
      threads_(threads) {}

CollapsedMh::State CollapsedMh::init(InitOptions opts, RngStream& rng) const {
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    ParameterVector theta = draw_initial_theta(model_, opts, rng);
    const double lp = model_.log_prior(theta);
    if (lp == kNegInf) continue;
    auto bound = law_.bind(theta);
    if (!bound->has_noise_space())
      throw CapabilityError("collapsed MH: model has no noise-space representation");
    const RngStream block = rng.spawn();
    std::vector<double> phi(bound->size());
    bool ok = true;
    for (std::size_t i = 0; i < bound->size() && ok; ++i) {
      RngStream di = block.substream(i);
      long long attempts = 0;
      for (;;) {
        if (++attempts > opts.cap) {
          ok = false;
          break;
        }
        phi[i] = bound->sample_noise(i, di);
        if (kernel_.hit1(bound->obs_from_noise(i, phi[i]), law_.data().scalar(i))) break;
      }
    }
    if (!ok) continue;
    return State{std::move(theta), lp, CollapsedState{std::move(phi), {}}};
  }
  init_failed();
}

bool CollapsedMh::step(State& s, RngStream& rng) const {
  // Theta move holding the noise fixed: the collapsed target is evaluable
  // pointwise, so no data are simulated here.
  auto [proposed, log_q_ratio] = proposal_.propose(s.theta, rng);
  const double lp = model_.log_prior(proposed);
  bool accepted = false;
  if (lp != kNegInf) {
    auto bound_cur = law_.bind(s.theta);
    auto bound_new = law_.bind(proposed);
    bool all_hit = true;
    double log_noise_ratio = 0.0;
    for (std::size_t i = 0; i < bound_new->size(); ++i) {
      if (!kernel_.hit1(bound_new->obs_from_noise(i, s.noise.obs_noise[i]), law_.data().scalar(i))) {
        all_hit = false;
        break;
      }
      log_noise_ratio +=
          bound_new->log_noise_density(i, s.noise.obs_noise[i]) - bound_cur->log_noise_density(i, s.noise.obs_noise[i]);
    }
    if (all_hit) {
      const double log_ratio = (lp - s.log_prior) + log_noise_ratio + log_q_ratio;
      if (mh_accept(log_ratio, rng)) {
        s.theta = std::move(proposed);
        s.log_prior = lp;
        accepted = true;
      }
    }
  }
  // Independence refresh of the noise coordinates, one block per datum.
  if (refresh_noise_) {
    auto bound = law_.bind(s.theta);
    const RngStream block = rng.spawn();
    noise_refresh(*bound, law_.data(), kernel_, s.noise.obs_noise, block, threads_);
  }
  return accepted;
}

}  // namespace tsabc
