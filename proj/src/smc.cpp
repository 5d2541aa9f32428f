#include "tsabc/smc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsabc/kernels.hpp"

namespace tsabc {

double ParticleSystem::weight_sum() const {
  double s = 0.0;
  for (double wi : w) s += wi;
  return s;
}

namespace {

// Inverse-CDF lookup into a weight prefix sum.
std::size_t pick_index(const std::vector<double>& cumw, double u) {
  const double target = u * cumw.back();
  const auto it = std::upper_bound(cumw.begin(), cumw.end(), target);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cumw.begin()), cumw.size() - 1);
}

std::vector<double> prefix_sum(const std::vector<double>& w) {
  std::vector<double> cumw(w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i];
    cumw[i] = acc;
  }
  return cumw;
}

double ess_of(const std::vector<double>& w) {
  double s = 0.0, s2 = 0.0;
  for (double wi : w) {
    s += wi;
    s2 += wi * wi;
  }
  return s2 > 0.0 ? s * s / s2 : 0.0;
}

}  // namespace

std::optional<ParticleSystem> resample_multinomial(const ParticleSystem& ps, RngStream& rng) {
  if (ps.collapsed()) return std::nullopt;
  const auto cumw = prefix_sum(ps.w);
  ParticleSystem out;
  out.t = ps.t;
  const std::size_t n = ps.size();
  out.x.resize(n);
  out.u.resize(n);
  out.w.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = pick_index(cumw, rng.uniform());
    out.x[i] = ps.x[k];
    out.u[i] = ps.u[k];
  }
  return out;
}

std::optional<ParticleSystem> resample_systematic(const ParticleSystem& ps, RngStream& rng) {
  if (ps.collapsed()) return std::nullopt;
  const auto cumw = prefix_sum(ps.w);
  const std::size_t n = ps.size();
  ParticleSystem out;
  out.t = ps.t;
  out.x.resize(n);
  out.u.resize(n);
  out.w.assign(n, 1.0);
  const double step = cumw.back() / static_cast<double>(n);
  double pos = rng.uniform() * step;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (k + 1 < n && cumw[k] <= pos) ++k;
    out.x[i] = ps.x[k];
    out.u[i] = ps.u[k];
    pos += step;
  }
  return out;
}

double filter_expectation(const ParticleSystem& ps,
                          const std::function<double(double, double)>& xi) {
  const double s = ps.weight_sum();
  if (!(s > 0.0)) throw std::invalid_argument("filter_expectation: collapsed particle system");
  double acc = 0.0;
  for (std::size_t i = 0; i < ps.size(); ++i) acc += ps.w[i] * xi(ps.x[i], ps.u[i]);
  return acc / s;
}

// ----------------------------------------------------------------------------
// shared propagation body
// ----------------------------------------------------------------------------
namespace {

struct PropagationTarget {
  const HmmModel& model;
  const ParameterVector& theta;
  const LatentProposal* proposal;  // nullptr: bootstrap
};

// Propagate one particle from ancestor state, simulate its auxiliary
// observation and weight it. Exactly one ancestor draw path per attempt, all
// randomness from `rng`.
inline void propagate_one(const PropagationTarget& tgt, const AbcKernel& kernel, double x_prev,
                          double y, std::size_t step, RngStream& rng, double& x_out,
                          double& u_out, double& w_out) {
  double x, log_ratio = 0.0;
  if (tgt.proposal == nullptr) {
    x = tgt.model.sample_transition(tgt.theta, x_prev, step, rng);
  } else {
    x = tgt.proposal->sample(tgt.theta, x_prev, step, rng);
    log_ratio = tgt.model.transition_log_density(tgt.theta, x_prev, x, step) -
                tgt.proposal->log_density(tgt.theta, x_prev, x, step);
  }
  const double u = tgt.model.sample_obs(tgt.theta, x, rng);
  x_out = x;
  u_out = u;
  w_out = kernel.hit1(u, y) ? std::exp(log_ratio) : 0.0;
}

// Standard-SMC propagation of a full step; serial reference and OpenMP
// variants keyed identically per particle.
void propagate_step_serial(const PropagationTarget& tgt, const AbcKernel& kernel,
                           const std::vector<double>& ancestors, double y, std::size_t step,
                           const RngStream& block, ParticleSystem& out) {
  for (std::size_t j = 0; j < ancestors.size(); ++j) {
    RngStream rng = block.substream(j);
    propagate_one(tgt, kernel, ancestors[j], y, step, rng, out.x[j], out.u[j], out.w[j]);
  }
}

void propagate_step_omp(const PropagationTarget& tgt, const AbcKernel& kernel,
                        const std::vector<double>& ancestors, double y, std::size_t step,
                        const RngStream& block, ParticleSystem& out, int threads) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(ancestors.size()); ++j) {
    RngStream rng = block.substream(static_cast<std::uint64_t>(j));
    const auto idx = static_cast<std::size_t>(j);
    propagate_one(tgt, kernel, ancestors[idx], y, step, rng, out.x[idx], out.u[idx], out.w[idx]);
  }
  (void)threads;
}

void check_capabilities(const HmmModel& model, const FilterOptions& opts) {
  if (!model.can_sample_transition())
    throw CapabilityError("filter: model cannot sample its latent transition");
  if (!model.can_sample_obs())
    throw CapabilityError("filter: model cannot simulate observations");
  if (opts.proposal && !model.has_transition_log_density())
    throw CapabilityError(
        "filter: a non-bootstrap proposal needs an evaluable transition density");
  if (opts.kernel.dim != 1)
    throw std::invalid_argument("filter: scalar observation models only");
}

}  // namespace

FilterResult smc_abc_filter(const HmmModel& model, const ParameterVector& theta,
                            const ObservationSeries& y, const FilterOptions& opts,
                            RngStream& rng) {
  check_capabilities(model, opts);
  if (opts.particles < 1) throw std::invalid_argument("smc_abc_filter: need at least 1 particle");
  if (y.dim != 1) throw std::invalid_argument("smc_abc_filter: scalar series only");
  const std::size_t n_particles = opts.particles;
  const int threads = resolve_threads(opts.threads);
  const PropagationTarget tgt{model, theta, opts.proposal ? &*opts.proposal : nullptr};

  FilterResult res;
  res.nc.log_value = 0.0;
  ParticleSystem ps;
  ps.x.resize(n_particles);
  ps.u.resize(n_particles);
  ps.w.resize(n_particles);

  std::vector<double> ancestors(n_particles, model.initial_state(theta));
  for (std::size_t t = 1; t <= y.n; ++t) {
    if (t > 1) {
      // Resample every step, exactly as the estimator is defined.
      const auto resampled = (opts.resampling == Resampling::multinomial)
                                 ? resample_multinomial(ps, rng)
                                 : resample_systematic(ps, rng);
      ancestors = resampled->x;
    }
    const RngStream block = rng.spawn();
    ps.t = t;
    if (threads <= 1)
      propagate_step_serial(tgt, opts.kernel, ancestors, y.scalar(t - 1), t, block, ps);
    else
      propagate_step_omp(tgt, opts.kernel, ancestors, y.scalar(t - 1), t, block, ps, threads);

    const double sumw = ps.weight_sum();
    StepRecord rec;
    rec.trials = static_cast<long long>(n_particles);
    rec.hits = static_cast<std::size_t>(
        std::count_if(ps.w.begin(), ps.w.end(), [](double w) { return w > 0.0; }));
    rec.ess = ess_of(ps.w);
    if (sumw <= 0.0) {
      rec.log_factor = kNegInf;
      res.history.push_back(rec);
      res.nc.per_step_log_factors.push_back(kNegInf);
      res.nc.log_value = kNegInf;
      res.nc.collapsed_at = t;
      res.particles = std::move(ps);
      return res;  // collapse: halt, the estimate is zero
    }
    rec.log_factor =
        std::log(sumw / static_cast<double>(n_particles)) - opts.kernel.log_volume;
    res.history.push_back(rec);
    res.nc.per_step_log_factors.push_back(rec.log_factor);
    res.nc.log_value += rec.log_factor;
  }
  res.particles = std::move(ps);
  return res;
}

// ----------------------------------------------------------------------------
// alive filter
// ----------------------------------------------------------------------------
namespace {

struct Attempt {
  double x = 0.0;
  double u = 0.0;
  double w = 0.0;
};

// One alive attempt, fully keyed by its attempt index: ancestor pick (from
// the alive set's weights), propagation and auxiliary simulation all draw
// from the attempt's own substream, so serial scan and wave-parallel
// evaluation produce the same sequence.
inline Attempt alive_attempt(const PropagationTarget& tgt, const AbcKernel& kernel,
                             const std::vector<double>& alive_x,
                             const std::vector<double>& alive_cumw, double x0, double y,
                             std::size_t step, const RngStream& block, std::uint64_t attempt) {
  RngStream rng = block.substream(attempt);
  double x_prev;
  if (step == 1) {
    x_prev = x0;
  } else {
    x_prev = alive_x[pick_index(alive_cumw, rng.uniform())];
  }
  Attempt a;
  propagate_one(tgt, kernel, x_prev, y, step, rng, a.x, a.u, a.w);
  return a;
}

}  // namespace

FilterResult alive_smc_filter(const HmmModel& model, const ParameterVector& theta,
                              const ObservationSeries& y, const FilterOptions& opts,
                              RngStream& rng) {
  check_capabilities(model, opts);
  if (opts.particles < 2)
    throw std::invalid_argument("alive_smc_filter: need at least 2 particles");
  if (y.dim != 1) throw std::invalid_argument("alive_smc_filter: scalar series only");
  const std::size_t n_target = opts.particles;  // successes required per step
  const int threads = resolve_threads(opts.threads);
  const PropagationTarget tgt{model, theta, opts.proposal ? &*opts.proposal : nullptr};
  const double x0 = model.initial_state(theta);

  FilterResult res;
  res.nc.log_value = 0.0;
  std::vector<double> alive_x, alive_u, alive_w;

  // Wave size for the parallel path; the serial reference is wave size 1.
  const std::size_t wave = threads <= 1 ? 1 : static_cast<std::size_t>(threads) * 16;
  std::vector<Attempt> buf(wave);

  for (std::size_t t = 1; t <= y.n; ++t) {
    const std::vector<double> cumw = (t == 1) ? std::vector<double>{} : prefix_sum(alive_w);
    const RngStream block = rng.spawn();
    const double yt = y.scalar(t - 1);

    std::vector<double> next_x, next_u, next_w;
    next_x.reserve(n_target - 1);
    std::size_t successes = 0;
    long long m_t = -1;
    std::uint64_t attempt = 0;
    while (m_t < 0 && static_cast<long long>(attempt) < opts.cap) {
      const std::size_t batch = std::min<std::size_t>(
          wave, static_cast<std::size_t>(opts.cap - static_cast<long long>(attempt)));
      if (threads <= 1) {
        buf[0] = alive_attempt(tgt, opts.kernel, alive_x, cumw, x0, yt, t, block, attempt);
      } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(batch); ++k)
          buf[static_cast<std::size_t>(k)] =
              alive_attempt(tgt, opts.kernel, alive_x, cumw, x0, yt, t, block,
                            attempt + static_cast<std::uint64_t>(k));
      }
      // Scan the wave in attempt order; attempts past the Nth success are
      // discarded (their randomness never fed anything else).
      const std::size_t scanned = threads <= 1 ? 1 : batch;
      for (std::size_t k = 0; k < scanned; ++k) {
        const Attempt& a = buf[k];
        ++attempt;
        if (a.w > 0.0) {
          ++successes;
          if (successes < n_target) {
            next_x.push_back(a.x);
            next_u.push_back(a.u);
            next_w.push_back(a.w);
          } else {
            m_t = static_cast<long long>(attempt);
            break;
          }
        }
      }
    }
    if (m_t < 0) {
      res.cap_failed = true;
      res.cap_failed_at = t;
      res.nc.log_value = kNegInf;
      res.particles.t = t;
      return res;  // flagged failure: counted trials so far are in nc.trial_counts
    }
    res.nc.trial_counts.push_back(m_t);
    StepRecord rec;
    rec.trials = m_t;
    rec.hits = n_target;
    rec.ess = ess_of(next_w);
    rec.log_factor = std::log(static_cast<double>(n_target - 1)) -
                     std::log(static_cast<double>(m_t - 1)) - opts.kernel.log_volume;
    res.history.push_back(rec);
    res.nc.per_step_log_factors.push_back(rec.log_factor);
    res.nc.log_value += rec.log_factor;
    alive_x = std::move(next_x);
    alive_u = std::move(next_u);
    alive_w = std::move(next_w);
  }
  res.particles.x = std::move(alive_x);
  res.particles.u = std::move(alive_u);
  res.particles.w = std::move(alive_w);
  res.particles.t = y.n;
  return res;
}

}  // namespace tsabc
