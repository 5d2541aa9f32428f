#pragma once

#include <memory>

#include "tsabc/mcmc.hpp"
#include "tsabc/models.hpp"
#include "tsabc/smc.hpp"

namespace tsabc {

enum class FilterKind { standard, alive };

// Particle-marginal Metropolis-Hastings on theta: each proposal runs a fresh
// filter and enters the acceptance ratio through its normalizing-constant
// estimate (all in log space). A collapsed standard-SMC run is rejected
// surely; an alive-filter cap failure is rejected surely and counted through
// Trace::cap_events. Rejected iterations keep the stored estimate untouched
// (no refresh), which is what keeps the theta marginal exact.
class Pmmh {
 public:
  struct State {
    ParameterVector theta;
    double log_prior = 0.0;
    double log_nc = 0.0;
  };

  Pmmh(const HmmModel& model, const ObservationSeries& y, FilterKind kind, FilterOptions filter,
       Proposal proposal);

  State init(InitOptions opts, RngStream& rng) const;
  bool step(State& s, RngStream& rng) const;

  double extra(const State& s) const { return s.log_nc; }
  const char* extra_name() const { return "log_nc"; }
  bool last_step_capped() const { return last_capped_; }

  FilterResult run_filter(const ParameterVector& theta, RngStream& rng) const;

 private:
  const HmmModel& model_;
  const ObservationSeries& y_;
  FilterKind kind_;
  FilterOptions filter_;
  Proposal proposal_;
  mutable bool last_capped_ = false;
};

// Convenience driver: initialize from the prior (bounded retries for a finite
// first estimate) and run the chain.
Trace run_pmmh(const HmmModel& model, const ObservationSeries& y, FilterKind kind,
               const FilterOptions& filter, const Proposal& proposal, const InitOptions& init,
               std::size_t iterations, RngStream& rng);

// PMMH over the collapsed representation: the embedded filter propagates in
// noise space through CollapsedHmmView, so doubly intractable models (hidden
// transition density, unevaluable observation density) can be fitted as long
// as both noise sequences can be sampled. The acceptance rule is unchanged.
Trace run_collapsed_pmmh(std::shared_ptr<const HmmModel> model, const ObservationSeries& y,
                         FilterKind kind, const FilterOptions& filter, const Proposal& proposal,
                         const InitOptions& init, std::size_t iterations, RngStream& rng);

}  // namespace tsabc
