#include "tsabc/pmmh.hpp"

#include <cmath>

namespace tsabc {

namespace {
bool mh_accept(double log_ratio, RngStream& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) {
    rng.uniform_pos();
    return true;
  }
  return std::log(rng.uniform_pos()) < log_ratio;
}
}  // namespace

Pmmh::Pmmh(const HmmModel& model, const ObservationSeries& y, FilterKind kind,
           FilterOptions filter, Proposal proposal)
    : model_(model), y_(y), kind_(kind), filter_(std::move(filter)), proposal_(std::move(proposal)) {}

FilterResult Pmmh::run_filter(const ParameterVector& theta, RngStream& rng) const {
  RngStream frng = rng.spawn();
  return kind_ == FilterKind::standard ? smc_abc_filter(model_, theta, y_, filter_, frng)
                                       : alive_smc_filter(model_, theta, y_, filter_, frng);
}

Pmmh::State Pmmh::init(InitOptions opts, RngStream& rng) const {
  for (int attempt = 0; attempt < opts.max_retries; ++attempt) {
    // A supplied theta0 is kept and the filter rerun; otherwise redraw from
    // the prior each attempt.
    ParameterVector theta = opts.theta0 ? model_.params_from_values(*opts.theta0)
                                        : model_.sample_prior(rng);
    const double lp = model_.log_prior(theta);
    if (lp == kNegInf) continue;
    const FilterResult fr = run_filter(theta, rng);
    if (fr.cap_failed || fr.nc.log_value == kNegInf) continue;
    return State{std::move(theta), lp, fr.nc.log_value};
  }
  throw InitError(
      "pmmh init: no finite normalizing-constant estimate after the retry budget; raise abc.eps "
      "or switch to the alive filter");
}

bool Pmmh::step(State& s, RngStream& rng) const {
  last_capped_ = false;
  auto [proposed, log_q_ratio] = proposal_.propose(s.theta, rng);
  const double lp = model_.log_prior(proposed);
  if (lp == kNegInf) return false;
  const FilterResult fr = run_filter(proposed, rng);
  if (fr.cap_failed) {
    last_capped_ = true;
    return false;
  }
  if (fr.nc.log_value == kNegInf) return false;  // collapsed run: sure rejection
  const double log_ratio = (fr.nc.log_value - s.log_nc) + (lp - s.log_prior) + log_q_ratio;
  if (!mh_accept(log_ratio, rng)) return false;
  s.theta = std::move(proposed);
  s.log_prior = lp;
  s.log_nc = fr.nc.log_value;
  return true;
}

Trace run_pmmh(const HmmModel& model, const ObservationSeries& y, FilterKind kind,
               const FilterOptions& filter, const Proposal& proposal, const InitOptions& init,
               std::size_t iterations, RngStream& rng) {
  Pmmh sampler(model, y, kind, filter, proposal);
  auto state = sampler.init(init, rng);
  return run_chain(sampler, std::move(state), iterations, rng);
}

Trace run_collapsed_pmmh(std::shared_ptr<const HmmModel> model, const ObservationSeries& y,
                         FilterKind kind, const FilterOptions& filter, const Proposal& proposal,
                         const InitOptions& init, std::size_t iterations, RngStream& rng) {
  CollapsedHmmView view(std::move(model));
  Pmmh sampler(view, y, kind, filter, proposal);
  auto state = sampler.init(init, rng);
  return run_chain(sampler, std::move(state), iterations, rng);
}

}  // namespace tsabc
