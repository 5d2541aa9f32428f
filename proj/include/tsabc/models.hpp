#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsabc/distributions.hpp"
#include "tsabc/errors.hpp"
#include "tsabc/rng.hpp"
#include "tsabc/types.hpp"

namespace tsabc {

enum class ModelKind { iid, odts, hmm };

struct SimulationResult {
  ObservationSeries obs;
  LatentPath latent;  // empty for i.i.d. models
};

// ----------------------------------------------------------------------------
// Model base: parameter space, prior, and forward simulation.
// Instances are immutable after construction and shareable across threads.
// ----------------------------------------------------------------------------
class Model {
 public:
  virtual ~Model() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t param_dim() const = 0;
  virtual std::vector<std::string> param_names() const = 0;
  virtual std::vector<ParamSupport> param_support() const = 0;

  // log pi(theta); -inf outside the support (a value, not an error).
  virtual double log_prior(const ParameterVector& theta) const = 0;
  virtual ParameterVector sample_prior(RngStream& rng) const = 0;

  // Default parameter values used for synthetic-data generation and
  // fixed-theta filter runs when the user supplies none.
  virtual ParameterVector default_params() const = 0;

  virtual SimulationResult simulate(const ParameterVector& theta, std::size_t n,
                                    RngStream& rng) const = 0;

  ParameterVector params_from_values(std::vector<double> values) const;
};

// ----------------------------------------------------------------------------
// Factorized observation laws (i.i.d. and observation-driven models).
//
// A FactorizedLaw is a model bound to observed data: it exposes the per-datum
// conditional laws u_i | theta of the factorized ABC target. For i.i.d.
// models the law is the same at every index; for observation-driven models it
// carries the deterministic recursion driven by the *observed* series.
// bind() precomputes any per-theta state (e.g. the volatility path) once per
// proposal; the returned BoundLaw is immutable and safe for concurrent reads.
// ----------------------------------------------------------------------------
class BoundLaw {
 public:
  virtual ~BoundLaw() = default;

  virtual std::size_t size() const = 0;
  virtual double simulate(std::size_t i, RngStream& rng) const = 0;

  virtual bool has_log_density() const { return false; }
  virtual double log_density(std::size_t i, double u) const;

  // Analytic eps-smoothed log density log p_theta^eps(y_i), where y_i is the
  // datum the law is bound to (oracle models only).
  virtual bool has_smoothed_loglik() const { return false; }
  virtual double smoothed_loglik(std::size_t i, double eps) const;

  // Noise-space (collapsed) capabilities: phi ~ p_theta(phi) with evaluable
  // density, and the deterministic observation map u = phi_map(phi).
  virtual bool has_noise_space() const { return false; }
  virtual double sample_noise(std::size_t i, RngStream& rng) const;
  virtual double log_noise_density(std::size_t i, double phi) const;
  virtual double obs_from_noise(std::size_t i, double phi) const;
};

class FactorizedLaw {
 public:
  virtual ~FactorizedLaw() = default;
  virtual std::size_t size() const = 0;
  virtual const ObservationSeries& data() const = 0;
  virtual std::unique_ptr<BoundLaw> bind(const ParameterVector& theta) const = 0;
};

class FactorizedModel : public Model {
 public:
  virtual std::unique_ptr<FactorizedLaw> make_law(const ObservationSeries& data) const = 0;
};

// ----------------------------------------------------------------------------
// Scalar i.i.d. models.
// ----------------------------------------------------------------------------
class IidModel : public FactorizedModel {
 public:
  ModelKind kind() const override { return ModelKind::iid; }

  virtual double sample_obs(const ParameterVector& theta, RngStream& rng) const = 0;

  virtual bool has_log_density() const { return false; }
  virtual double log_density(const ParameterVector& theta, double y) const;

  virtual bool has_smoothed_loglik() const { return false; }
  virtual double smoothed_loglik(const ParameterVector& theta, double y, double eps) const;

  virtual bool has_noise_space() const { return false; }
  virtual double sample_noise(const ParameterVector& theta, RngStream& rng) const;
  virtual double log_noise_density(const ParameterVector& theta, double phi) const;
  virtual double obs_from_noise(const ParameterVector& theta, double phi) const;

  // n independent draws; theta outside the support is a domain error.
  SimulationResult simulate(const ParameterVector& theta, std::size_t n,
                            RngStream& rng) const override;

  // Exact log likelihood (sum of pointwise log densities); oracle models only.
  double loglik(const ParameterVector& theta, const ObservationSeries& y) const;

  std::unique_ptr<FactorizedLaw> make_law(const ObservationSeries& data) const override;
};

// Y = theta + phi, phi ~ N(0,1), prior theta ~ N(0,1). The conjugate oracle
// model: exact posterior N(S/(n+1), 1/(n+1)) with S the sum of the data.
class NormalLocationModel final : public IidModel {
 public:
  std::size_t param_dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"theta"}; }
  std::vector<ParamSupport> param_support() const override { return {ParamSupport::real()}; }
  double log_prior(const ParameterVector& theta) const override;
  ParameterVector sample_prior(RngStream& rng) const override;
  ParameterVector default_params() const override;

  double sample_obs(const ParameterVector& theta, RngStream& rng) const override;
  bool has_log_density() const override { return true; }
  double log_density(const ParameterVector& theta, double y) const override;
  bool has_smoothed_loglik() const override { return true; }
  double smoothed_loglik(const ParameterVector& theta, double y, double eps) const override;
  bool has_noise_space() const override { return true; }
  double sample_noise(const ParameterVector& theta, RngStream& rng) const override;
  double log_noise_density(const ParameterVector& theta, double phi) const override;
  double obs_from_noise(const ParameterVector& theta, double phi) const override;
};

// Y = sigma * phi, phi ~ N(0,1): the scale family exhibiting the plain-ABC
// bias (the best-fitting sigma under smoothing shrinks below the truth).
class GaussianScaleModel final : public IidModel {
 public:
  std::size_t param_dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"sigma"}; }
  std::vector<ParamSupport> param_support() const override { return {ParamSupport::positive()}; }
  double log_prior(const ParameterVector& theta) const override;
  ParameterVector sample_prior(RngStream& rng) const override;
  ParameterVector default_params() const override;

  double sample_obs(const ParameterVector& theta, RngStream& rng) const override;
  bool has_log_density() const override { return true; }
  double log_density(const ParameterVector& theta, double y) const override;
  bool has_smoothed_loglik() const override { return true; }
  double smoothed_loglik(const ParameterVector& theta, double y, double eps) const override;
  bool has_noise_space() const override { return true; }
  double sample_noise(const ParameterVector& theta, RngStream& rng) const override;
  double log_noise_density(const ParameterVector& theta, double phi) const override;
  double obs_from_noise(const ParameterVector& theta, double phi) const override;
};

// ----------------------------------------------------------------------------
// GARCH(1,1) with alpha-stable returns: an observation-driven model whose
// likelihood is intractable (the stable density has no closed form).
//
//   Y_{n+1} ~ S(alpha, skew; scale = X_n, location = 0)
//   X_{n+1} = beta0 + beta1 * X_n + beta2 * Y_{n+1}^2
//
// theta = (beta0, beta1, beta2, x0), all positive, each with a Gamma prior;
// x0 is sampled and proposed like any other positive parameter. Bound to
// observed data, the conditional scale path is driven by the observations,
// so the per-datum laws stay conditionally independent.
// ----------------------------------------------------------------------------
class GarchModel final : public FactorizedModel {
 public:
  struct Config {
    double stable_alpha = 1.5;  // the model's s1 constant
    double stable_skew = 0.0;   // the model's s2 constant
    double prior_a = 2.0;       // x0 ~ Gamma(prior_a, prior_b)
    double prior_b = 0.125;
    double prior_c = 2.0;  // beta_j ~ Gamma(prior_c, prior_d)
    double prior_d = 0.125;
    double y0 = 0.0;  // initial observation of the general recursion; the
                      // GARCH(1,1) update does not consume it
  };

  GarchModel() : GarchModel(Config{}) {}
  explicit GarchModel(Config cfg);

  ModelKind kind() const override { return ModelKind::odts; }
  std::size_t param_dim() const override { return 4; }
  std::vector<std::string> param_names() const override;
  std::vector<ParamSupport> param_support() const override;
  double log_prior(const ParameterVector& theta) const override;
  ParameterVector sample_prior(RngStream& rng) const override;
  ParameterVector default_params() const override;
  SimulationResult simulate(const ParameterVector& theta, std::size_t n,
                            RngStream& rng) const override;
  std::unique_ptr<FactorizedLaw> make_law(const ObservationSeries& data) const override;

  const Config& config() const { return cfg_; }

 private:
  Config cfg_;
};

// Volatility recursion shared by simulation and data-bound laws.
// Returns the per-observation scale path (scale of y_{i+1} is x_i) and the
// updated states.
std::vector<double> garch_scale_path(double beta0, double beta1, double beta2, double x0,
                                     const ObservationSeries& y);

// ----------------------------------------------------------------------------
// Hidden Markov models (scalar latent state, scalar observations).
// ----------------------------------------------------------------------------
class HmmModel : public Model {
 public:
  ModelKind kind() const override { return ModelKind::hmm; }

  virtual double initial_state(const ParameterVector& theta) const = 0;

  virtual bool can_sample_transition() const { return true; }
  virtual double sample_transition(const ParameterVector& theta, double x_prev, std::size_t step,
                                   RngStream& rng) const = 0;
  virtual bool has_transition_log_density() const { return false; }
  virtual double transition_log_density(const ParameterVector& theta, double x_prev, double x,
                                        std::size_t step) const;

  virtual bool can_sample_obs() const { return true; }
  virtual double sample_obs(const ParameterVector& theta, double x, RngStream& rng) const = 0;
  virtual bool has_obs_log_density() const { return false; }
  virtual double obs_log_density(const ParameterVector& theta, double x, double y) const;

  // Collapsed-representation capabilities: the driving noises phi (observation)
  // and eta (latent) with samplers and/or densities, plus the deterministic
  // maps to observation and next state.
  virtual bool can_sample_obs_noise() const { return false; }
  virtual double sample_obs_noise(const ParameterVector& theta, RngStream& rng) const;
  virtual bool has_obs_noise_log_density() const { return false; }
  virtual double obs_noise_log_density(const ParameterVector& theta, double phi) const;
  virtual double obs_from_noise(const ParameterVector& theta, double x, double phi) const;

  virtual bool can_sample_latent_noise() const { return false; }
  virtual double sample_latent_noise(const ParameterVector& theta, RngStream& rng) const;
  virtual bool has_latent_noise_log_density() const { return false; }
  virtual double latent_noise_log_density(const ParameterVector& theta, double eta) const;
  virtual double state_from_noise(const ParameterVector& theta, double x_prev, double eta,
                                  std::size_t step) const;

  SimulationResult simulate(const ParameterVector& theta, std::size_t n,
                            RngStream& rng) const override;
};

// Stochastic volatility with alpha-stable observation noise:
//   Y_n = phi_n * beta * exp(X_n),  phi_n ~ S(alpha, skew; scale, 0)
//   X_n = a * X_{n-1} + eta_n,      eta_n ~ N(0, c),  x_0 = 0
// theta = (beta, c, a); c is the *variance* of the latent noise. The
// autoregressive coefficient is named `a` here because the ABC tolerance
// already owns the symbol epsilon. Priors: beta ~ N(0, 10) (variance 10),
// c ~ IG(2, 1/100), a ~ IG(2, 1/50); the inverse-gamma priors have infinite
// variance, and the prior on `a` is supported on all of (0, inf), so
// stationarity is not enforced.
class SvModel final : public HmmModel {
 public:
  struct Config {
    double stable_scale = 1.0;   // the model's s1 constant
    double stable_alpha = 1.75;  // the model's s2 constant (stability index)
    double stable_skew = 1.0;    // the model's s3 constant
  };

  SvModel() : SvModel(Config{}) {}
  explicit SvModel(Config cfg) : cfg_(cfg) {}

  std::size_t param_dim() const override { return 3; }
  std::vector<std::string> param_names() const override { return {"beta", "c", "a"}; }
  std::vector<ParamSupport> param_support() const override;
  double log_prior(const ParameterVector& theta) const override;
  ParameterVector sample_prior(RngStream& rng) const override;
  ParameterVector default_params() const override;

  double initial_state(const ParameterVector&) const override { return 0.0; }
  double sample_transition(const ParameterVector& theta, double x_prev, std::size_t step,
                           RngStream& rng) const override;
  bool has_transition_log_density() const override { return true; }
  double transition_log_density(const ParameterVector& theta, double x_prev, double x,
                                std::size_t step) const override;
  double sample_obs(const ParameterVector& theta, double x, RngStream& rng) const override;

  bool can_sample_obs_noise() const override { return true; }
  double sample_obs_noise(const ParameterVector& theta, RngStream& rng) const override;
  double obs_from_noise(const ParameterVector& theta, double x, double phi) const override;
  bool can_sample_latent_noise() const override { return true; }
  double sample_latent_noise(const ParameterVector& theta, RngStream& rng) const override;
  bool has_latent_noise_log_density() const override { return true; }
  double latent_noise_log_density(const ParameterVector& theta, double eta) const override;
  double state_from_noise(const ParameterVector& theta, double x_prev, double eta,
                          std::size_t step) const override;

  SimulationResult simulate(const ParameterVector& theta, std::size_t n,
                            RngStream& rng) const override;

  const Config& config() const { return cfg_; }

 private:
  Config cfg_;
};

// Fully tractable toy HMM used to validate the particle machinery against
// quadrature: X_1 ~ N(mu, sigma0^2), X_n = X_{n-1} for n >= 2 (the whole path
// is one latent variable), Y_n ~ N(X_n, sigma_y^2). theta = mu, prior N(0,1).
class ToyHmmModel : public HmmModel {
 public:
  struct Config {
    double sigma0 = 1.0;
    double sigma_y = 1.0;
  };

  ToyHmmModel() : ToyHmmModel(Config{}) {}
  explicit ToyHmmModel(Config cfg) : cfg_(cfg) {}

  std::size_t param_dim() const override { return 1; }
  std::vector<std::string> param_names() const override { return {"mu"}; }
  std::vector<ParamSupport> param_support() const override { return {ParamSupport::real()}; }
  double log_prior(const ParameterVector& theta) const override;
  ParameterVector sample_prior(RngStream& rng) const override;
  ParameterVector default_params() const override;

  double initial_state(const ParameterVector&) const override { return 0.0; }
  double sample_transition(const ParameterVector& theta, double x_prev, std::size_t step,
                           RngStream& rng) const override;
  bool has_transition_log_density() const override { return true; }
  // Defined for step 1 only; later steps are a point mass.
  double transition_log_density(const ParameterVector& theta, double x_prev, double x,
                                std::size_t step) const override;
  double sample_obs(const ParameterVector& theta, double x, RngStream& rng) const override;
  bool has_obs_log_density() const override { return true; }
  double obs_log_density(const ParameterVector& theta, double x, double y) const override;

  bool can_sample_obs_noise() const override { return true; }
  double sample_obs_noise(const ParameterVector& theta, RngStream& rng) const override;
  bool has_obs_noise_log_density() const override { return true; }
  double obs_noise_log_density(const ParameterVector& theta, double phi) const override;
  double obs_from_noise(const ParameterVector& theta, double x, double phi) const override;
  bool can_sample_latent_noise() const override { return true; }
  double sample_latent_noise(const ParameterVector& theta, RngStream& rng) const override;
  bool has_latent_noise_log_density() const override { return true; }
  double latent_noise_log_density(const ParameterVector& theta, double eta) const override;
  double state_from_noise(const ParameterVector& theta, double x_prev, double eta,
                          std::size_t step) const override;

  const Config& config() const { return cfg_; }

 private:
  Config cfg_;
};

// Adapter that re-expresses an HMM through its driving noises: transitions
// and observations are produced by sampling eta / phi and applying the
// deterministic maps, so a doubly intractable model (hidden transition
// density, unevaluable observation density) can still be filtered as long as
// both noises can be sampled.
class CollapsedHmmView final : public HmmModel {
 public:
  explicit CollapsedHmmView(std::shared_ptr<const HmmModel> base);

  std::size_t param_dim() const override { return base_->param_dim(); }
  std::vector<std::string> param_names() const override { return base_->param_names(); }
  std::vector<ParamSupport> param_support() const override { return base_->param_support(); }
  double log_prior(const ParameterVector& theta) const override { return base_->log_prior(theta); }
  ParameterVector sample_prior(RngStream& rng) const override { return base_->sample_prior(rng); }
  ParameterVector default_params() const override { return base_->default_params(); }

  double initial_state(const ParameterVector& theta) const override {
    return base_->initial_state(theta);
  }
  double sample_transition(const ParameterVector& theta, double x_prev, std::size_t step,
                           RngStream& rng) const override;
  double sample_obs(const ParameterVector& theta, double x, RngStream& rng) const override;

  const HmmModel& base() const { return *base_; }

 private:
  std::shared_ptr<const HmmModel> base_;
};

// ----------------------------------------------------------------------------
// Noisy ABC perturbation and random-walk proposals.
// ----------------------------------------------------------------------------

// Replace each observation by a uniform draw on the eps-ball around it.
// Perturbing an already-perturbed series is a usage error.
ObservationSeries perturb_noisy(const ObservationSeries& y, double eps, RngStream& rng);

struct ProposalComponent {
  enum class Kind {
    random_walk,      // theta' = theta + scale * N(0,1)
    log_random_walk,  // theta' = theta * exp(scale * N(0,1)); Jacobian-corrected
    gamma_moment      // theta' ~ Gamma with mean theta, variance scale^2
  };
  Kind kind = Kind::random_walk;
  double scale = 0.1;
};

struct Proposal {
  std::vector<ProposalComponent> components;

  // Draws theta' ~ Q(.|theta) and returns (theta', log q(theta|theta') -
  // log q(theta'|theta)). A zero scale leaves the component untouched and
  // consumes no randomness.
  std::pair<ParameterVector, double> propose(const ParameterVector& theta, RngStream& rng) const;

  static Proposal random_walk(std::size_t dim, double scale);
  static Proposal log_random_walk(std::size_t dim, double scale);
};

// ----------------------------------------------------------------------------
// Registry used by the CLI. `overrides` carries model constants (not inferred
// parameters), keyed as documented per model; unknown keys raise ConfigError.
// ----------------------------------------------------------------------------
std::shared_ptr<Model> make_model(const std::string& id,
                                  const std::map<std::string, double>& overrides);

}  // namespace tsabc
