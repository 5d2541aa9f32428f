#include "tsabc/models.hpp"

#include <cmath>
#include <stdexcept>

#include "tsabc/abc.hpp"

namespace tsabc {

ParameterVector Model::params_from_values(std::vector<double> values) const {
  if (values.size() != param_dim())
    throw std::invalid_argument("params_from_values: wrong parameter count");
  return ParameterVector{std::move(values), param_names(), param_support()};
}

// --- BoundLaw / IidModel defaults -------------------------------------------

double BoundLaw::log_density(std::size_t, double) const {
  throw CapabilityError("this law has no pointwise observation density");
}
double BoundLaw::smoothed_loglik(std::size_t, double) const {
  throw CapabilityError("this law has no analytic smoothed likelihood");
}
double BoundLaw::sample_noise(std::size_t, RngStream&) const {
  throw CapabilityError("this law has no noise-space representation");
}
double BoundLaw::log_noise_density(std::size_t, double) const {
  throw CapabilityError("this law has no noise-space representation");
}
double BoundLaw::obs_from_noise(std::size_t, double) const {
  throw CapabilityError("this law has no noise-space representation");
}

double IidModel::log_density(const ParameterVector&, double) const {
  throw CapabilityError("model has no pointwise observation density");
}
double IidModel::smoothed_loglik(const ParameterVector&, double, double) const {
  throw CapabilityError("model has no analytic smoothed likelihood");
}
double IidModel::sample_noise(const ParameterVector&, RngStream&) const {
  throw CapabilityError("model has no noise-space representation");
}
double IidModel::log_noise_density(const ParameterVector&, double) const {
  throw CapabilityError("model has no noise-space representation");
}
double IidModel::obs_from_noise(const ParameterVector&, double) const {
  throw CapabilityError("model has no noise-space representation");
}

SimulationResult IidModel::simulate(const ParameterVector& theta, std::size_t n,
                                    RngStream& rng) const {
  if (!theta.in_support()) throw std::domain_error("simulate: theta outside the model support");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = sample_obs(theta, rng);
  return {ObservationSeries::from_scalars(std::move(y)), LatentPath{}};
}

double IidModel::loglik(const ParameterVector& theta, const ObservationSeries& y) const {
  if (!has_log_density()) throw CapabilityError("loglik: model has no pointwise density");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.n; ++i) acc += log_density(theta, y.scalar(i));
  return acc;
}

namespace {

// Generic data-bound law for i.i.d. models: the same conditional law at every
// index.
class IidBound final : public BoundLaw {
 public:
  IidBound(const IidModel& m, ParameterVector theta, std::size_t n)
      : model_(m), theta_(std::move(theta)), n_(n) {}

  std::size_t size() const override { return n_; }
  double simulate(std::size_t, RngStream& rng) const override {
    return model_.sample_obs(theta_, rng);
  }
  bool has_log_density() const override { return model_.has_log_density(); }
  double log_density(std::size_t, double u) const override {
    return model_.log_density(theta_, u);
  }
  bool has_smoothed_loglik() const override { return model_.has_smoothed_loglik(); }
  double smoothed_loglik(std::size_t i, double eps) const override {
    return model_.smoothed_loglik(theta_, y_->scalar(i), eps);
  }
  bool has_noise_space() const override { return model_.has_noise_space(); }
  double sample_noise(std::size_t, RngStream& rng) const override {
    return model_.sample_noise(theta_, rng);
  }
  double log_noise_density(std::size_t, double phi) const override {
    return model_.log_noise_density(theta_, phi);
  }
  double obs_from_noise(std::size_t, double phi) const override {
    return model_.obs_from_noise(theta_, phi);
  }

  const ObservationSeries* y_ = nullptr;

 private:
  const IidModel& model_;
  ParameterVector theta_;
  std::size_t n_;
};

class IidLaw final : public FactorizedLaw {
 public:
  IidLaw(const IidModel& m, ObservationSeries data) : model_(m), data_(std::move(data)) {
    if (data_.dim != 1) throw std::invalid_argument("i.i.d. law: series must be scalar");
  }
  std::size_t size() const override { return data_.n; }
  const ObservationSeries& data() const override { return data_; }
  std::unique_ptr<BoundLaw> bind(const ParameterVector& theta) const override {
    auto b = std::make_unique<IidBound>(model_, theta, data_.n);
    b->y_ = &data_;
    return b;
  }

 private:
  const IidModel& model_;
  ObservationSeries data_;
};

}  // namespace

std::unique_ptr<FactorizedLaw> IidModel::make_law(const ObservationSeries& data) const {
  return std::make_unique<IidLaw>(*this, data);
}

// --- NormalLocationModel ------------------------------------------------------

double NormalLocationModel::log_prior(const ParameterVector& theta) const {
  return normal_logpdf(theta[0], 0.0, 1.0);
}
ParameterVector NormalLocationModel::sample_prior(RngStream& rng) const {
  return params_from_values({sample_gaussian(rng, 0.0, 1.0)});
}
ParameterVector NormalLocationModel::default_params() const { return params_from_values({0.0}); }
double NormalLocationModel::sample_obs(const ParameterVector& theta, RngStream& rng) const {
  return theta[0] + sample_gaussian(rng, 0.0, 1.0);
}
double NormalLocationModel::log_density(const ParameterVector& theta, double y) const {
  return normal_logpdf(y, theta[0], 1.0);
}
double NormalLocationModel::smoothed_loglik(const ParameterVector& theta, double y,
                                            double eps) const {
  return smoothed_gaussian_loglik(theta[0], 1.0, y, eps);
}
double NormalLocationModel::sample_noise(const ParameterVector&, RngStream& rng) const {
  return sample_gaussian(rng, 0.0, 1.0);
}
double NormalLocationModel::log_noise_density(const ParameterVector&, double phi) const {
  return normal_logpdf(phi, 0.0, 1.0);
}
double NormalLocationModel::obs_from_noise(const ParameterVector& theta, double phi) const {
  return theta[0] + phi;
}

// --- GaussianScaleModel -------------------------------------------------------

double GaussianScaleModel::log_prior(const ParameterVector& theta) const {
  return gamma_logpdf(theta[0], 2.0, 1.0);
}
ParameterVector GaussianScaleModel::sample_prior(RngStream& rng) const {
  return params_from_values({sample_gamma(rng, 2.0, 1.0)});
}
ParameterVector GaussianScaleModel::default_params() const { return params_from_values({1.0}); }
double GaussianScaleModel::sample_obs(const ParameterVector& theta, RngStream& rng) const {
  return theta[0] * sample_gaussian(rng, 0.0, 1.0);
}
double GaussianScaleModel::log_density(const ParameterVector& theta, double y) const {
  return normal_logpdf(y, 0.0, theta[0]);
}
double GaussianScaleModel::smoothed_loglik(const ParameterVector& theta, double y,
                                           double eps) const {
  return smoothed_gaussian_loglik(0.0, theta[0], y, eps);
}
double GaussianScaleModel::sample_noise(const ParameterVector&, RngStream& rng) const {
  return sample_gaussian(rng, 0.0, 1.0);
}
double GaussianScaleModel::log_noise_density(const ParameterVector&, double phi) const {
  return normal_logpdf(phi, 0.0, 1.0);
}
double GaussianScaleModel::obs_from_noise(const ParameterVector& theta, double phi) const {
  return theta[0] * phi;
}

// --- GarchModel ---------------------------------------------------------------

GarchModel::GarchModel(Config cfg) : cfg_(cfg) {
  StableParams{cfg_.stable_alpha, cfg_.stable_skew, 1.0, 0.0}.validate();
}

std::vector<std::string> GarchModel::param_names() const {
  return {"beta0", "beta1", "beta2", "x0"};
}
std::vector<ParamSupport> GarchModel::param_support() const {
  return {ParamSupport::positive(), ParamSupport::positive(), ParamSupport::positive(),
          ParamSupport::positive()};
}
double GarchModel::log_prior(const ParameterVector& theta) const {
  if (!theta.in_support()) return kNegInf;
  double lp = 0.0;
  for (std::size_t j = 0; j < 3; ++j) lp += gamma_logpdf(theta[j], cfg_.prior_c, cfg_.prior_d);
  lp += gamma_logpdf(theta[3], cfg_.prior_a, cfg_.prior_b);
  return lp;
}
ParameterVector GarchModel::sample_prior(RngStream& rng) const {
  std::vector<double> v(4);
  for (std::size_t j = 0; j < 3; ++j) v[j] = sample_gamma(rng, cfg_.prior_c, cfg_.prior_d);
  v[3] = sample_gamma(rng, cfg_.prior_a, cfg_.prior_b);
  return params_from_values(std::move(v));
}
ParameterVector GarchModel::default_params() const {
  // Heavy-tailed shocks feed back through y^2, so the default truth keeps the
  // recursion contractive; large beta1/beta2 make synthetic paths explode.
  return params_from_values({0.1, 0.2, 0.02, 0.2});
}

SimulationResult GarchModel::simulate(const ParameterVector& theta, std::size_t n,
                                      RngStream& rng) const {
  if (!theta.in_support())
    throw std::domain_error("garch simulate: beta and x0 must all be positive");
  const double beta0 = theta[0], beta1 = theta[1], beta2 = theta[2];
  double x = theta[3];
  std::vector<double> y(n), path(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = sample_stable(rng, StableParams{cfg_.stable_alpha, cfg_.stable_skew, x, 0.0});
    x = beta0 + beta1 * x + beta2 * y[i] * y[i];
    path[i] = x;
  }
  return {ObservationSeries::from_scalars(std::move(y)), LatentPath{std::move(path)}};
}

std::vector<double> garch_scale_path(double beta0, double beta1, double beta2, double x0,
                                     const ObservationSeries& y) {
  std::vector<double> scales(y.n);
  double x = x0;
  for (std::size_t i = 0; i < y.n; ++i) {
    scales[i] = x;  // scale of y_{i+1} is x_i
    const double yi = y.scalar(i);
    x = beta0 + beta1 * x + beta2 * yi * yi;
  }
  return scales;
}

namespace {

class GarchBound final : public BoundLaw {
 public:
  GarchBound(std::vector<double> scales, double alpha, double skew)
      : scales_(std::move(scales)), alpha_(alpha), skew_(skew) {}
  std::size_t size() const override { return scales_.size(); }
  double simulate(std::size_t i, RngStream& rng) const override {
    return sample_stable(rng, StableParams{alpha_, skew_, scales_[i], 0.0});
  }

 private:
  std::vector<double> scales_;
  double alpha_, skew_;
};

class GarchLaw final : public FactorizedLaw {
 public:
  GarchLaw(const GarchModel& m, ObservationSeries data) : model_(m), data_(std::move(data)) {
    if (data_.dim != 1) throw std::invalid_argument("garch law: series must be scalar");
  }
  std::size_t size() const override { return data_.n; }
  const ObservationSeries& data() const override { return data_; }
  std::unique_ptr<BoundLaw> bind(const ParameterVector& theta) const override {
    if (!theta.in_support())
      throw std::domain_error("garch law: theta outside the model support");
    return std::make_unique<GarchBound>(
        garch_scale_path(theta[0], theta[1], theta[2], theta[3], data_),
        model_.config().stable_alpha, model_.config().stable_skew);
  }

 private:
  const GarchModel& model_;
  ObservationSeries data_;
};

}  // namespace

std::unique_ptr<FactorizedLaw> GarchModel::make_law(const ObservationSeries& data) const {
  return std::make_unique<GarchLaw>(*this, data);
}

// --- HmmModel defaults --------------------------------------------------------

double HmmModel::transition_log_density(const ParameterVector&, double, double,
                                        std::size_t) const {
  throw CapabilityError("model has no evaluable transition density");
}
double HmmModel::obs_log_density(const ParameterVector&, double, double) const {
  throw CapabilityError("model has no evaluable observation density");
}
double HmmModel::sample_obs_noise(const ParameterVector&, RngStream&) const {
  throw CapabilityError("model cannot sample observation noise");
}
double HmmModel::obs_noise_log_density(const ParameterVector&, double) const {
  throw CapabilityError("model has no observation-noise density");
}
double HmmModel::obs_from_noise(const ParameterVector&, double, double) const {
  throw CapabilityError("model has no observation-noise map");
}
double HmmModel::sample_latent_noise(const ParameterVector&, RngStream&) const {
  throw CapabilityError("model cannot sample latent noise");
}
double HmmModel::latent_noise_log_density(const ParameterVector&, double) const {
  throw CapabilityError("model has no latent-noise density");
}
double HmmModel::state_from_noise(const ParameterVector&, double, double, std::size_t) const {
  throw CapabilityError("model has no latent-noise map");
}

SimulationResult HmmModel::simulate(const ParameterVector& theta, std::size_t n,
                                    RngStream& rng) const {
  std::vector<double> y(n), path(n);
  double x = initial_state(theta);
  for (std::size_t i = 0; i < n; ++i) {
    x = sample_transition(theta, x, i + 1, rng);
    path[i] = x;
    y[i] = sample_obs(theta, x, rng);
  }
  return {ObservationSeries::from_scalars(std::move(y)), LatentPath{std::move(path)}};
}

// --- SvModel --------------------------------------------------------------------

std::vector<ParamSupport> SvModel::param_support() const {
  return {ParamSupport::real(), ParamSupport::positive(), ParamSupport::positive()};
}
double SvModel::log_prior(const ParameterVector& theta) const {
  if (!theta.in_support()) return kNegInf;
  return normal_logpdf(theta[0], 0.0, std::sqrt(10.0)) +
         inverse_gamma_logpdf(theta[1], 2.0, 0.01) + inverse_gamma_logpdf(theta[2], 2.0, 0.02);
}
ParameterVector SvModel::sample_prior(RngStream& rng) const {
  std::vector<double> v(3);
  v[0] = sample_gaussian(rng, 0.0, std::sqrt(10.0));
  v[1] = sample_inverse_gamma(rng, 2.0, 0.01);
  v[2] = sample_inverse_gamma(rng, 2.0, 0.02);
  return params_from_values(std::move(v));
}
ParameterVector SvModel::default_params() const { return params_from_values({1.0, 0.1, 0.9}); }

double SvModel::sample_transition(const ParameterVector& theta, double x_prev, std::size_t,
                                  RngStream& rng) const {
  const double c = theta[1];
  if (c == 0.0) return theta[2] * x_prev;
  return theta[2] * x_prev + sample_gaussian(rng, 0.0, std::sqrt(c));
}
double SvModel::transition_log_density(const ParameterVector& theta, double x_prev, double x,
                                       std::size_t) const {
  const double c = theta[1];
  if (!(c > 0.0)) throw std::domain_error("sv transition density: c must be positive");
  return normal_logpdf(x, theta[2] * x_prev, std::sqrt(c));
}
double SvModel::sample_obs(const ParameterVector& theta, double x, RngStream& rng) const {
  return sample_obs_noise(theta, rng) * theta[0] * std::exp(x);
}
double SvModel::sample_obs_noise(const ParameterVector&, RngStream& rng) const {
  return sample_stable(rng,
                       StableParams{cfg_.stable_alpha, cfg_.stable_skew, cfg_.stable_scale, 0.0});
}
double SvModel::obs_from_noise(const ParameterVector& theta, double x, double phi) const {
  return phi * theta[0] * std::exp(x);
}
double SvModel::sample_latent_noise(const ParameterVector& theta, RngStream& rng) const {
  const double c = theta[1];
  if (c == 0.0) return 0.0;
  return sample_gaussian(rng, 0.0, std::sqrt(c));
}
double SvModel::latent_noise_log_density(const ParameterVector& theta, double eta) const {
  const double c = theta[1];
  if (!(c > 0.0)) throw std::domain_error("sv latent-noise density: c must be positive");
  return normal_logpdf(eta, 0.0, std::sqrt(c));
}
double SvModel::state_from_noise(const ParameterVector& theta, double x_prev, double eta,
                                 std::size_t) const {
  return theta[2] * x_prev + eta;
}

SimulationResult SvModel::simulate(const ParameterVector& theta, std::size_t n,
                                   RngStream& rng) const {
  if (theta[1] < 0.0) throw std::domain_error("sv simulate: c must be non-negative");
  return HmmModel::simulate(theta, n, rng);
}

// --- ToyHmmModel ------------------------------------------------------------------

double ToyHmmModel::log_prior(const ParameterVector& theta) const {
  return normal_logpdf(theta[0], 0.0, 1.0);
}
ParameterVector ToyHmmModel::sample_prior(RngStream& rng) const {
  return params_from_values({sample_gaussian(rng, 0.0, 1.0)});
}
ParameterVector ToyHmmModel::default_params() const { return params_from_values({0.5}); }

double ToyHmmModel::sample_transition(const ParameterVector& theta, double x_prev,
                                      std::size_t step, RngStream& rng) const {
  if (step == 1) return theta[0] + cfg_.sigma0 * sample_gaussian(rng, 0.0, 1.0);
  return x_prev;
}
double ToyHmmModel::transition_log_density(const ParameterVector& theta, double, double x,
                                           std::size_t step) const {
  if (step != 1)
    throw CapabilityError("toy hmm: transition is a point mass after the first step");
  return normal_logpdf(x, theta[0], cfg_.sigma0);
}
double ToyHmmModel::sample_obs(const ParameterVector&, double x, RngStream& rng) const {
  return x + cfg_.sigma_y * sample_gaussian(rng, 0.0, 1.0);
}
double ToyHmmModel::obs_log_density(const ParameterVector&, double x, double y) const {
  return normal_logpdf(y, x, cfg_.sigma_y);
}
double ToyHmmModel::sample_obs_noise(const ParameterVector&, RngStream& rng) const {
  return sample_gaussian(rng, 0.0, 1.0);
}
double ToyHmmModel::obs_noise_log_density(const ParameterVector&, double phi) const {
  return normal_logpdf(phi, 0.0, 1.0);
}
double ToyHmmModel::obs_from_noise(const ParameterVector&, double x, double phi) const {
  return x + cfg_.sigma_y * phi;
}
double ToyHmmModel::sample_latent_noise(const ParameterVector&, RngStream& rng) const {
  return sample_gaussian(rng, 0.0, 1.0);
}
double ToyHmmModel::latent_noise_log_density(const ParameterVector&, double eta) const {
  return normal_logpdf(eta, 0.0, 1.0);
}
double ToyHmmModel::state_from_noise(const ParameterVector& theta, double x_prev, double eta,
                                     std::size_t step) const {
  if (step == 1) return theta[0] + cfg_.sigma0 * eta;
  return x_prev;
}

// --- CollapsedHmmView ----------------------------------------------------------------

CollapsedHmmView::CollapsedHmmView(std::shared_ptr<const HmmModel> base)
    : base_(std::move(base)) {
  if (!base_->can_sample_latent_noise() || !base_->can_sample_obs_noise())
    throw CapabilityError(
        "collapsed view: model must expose samplers for both noise sequences");
}
double CollapsedHmmView::sample_transition(const ParameterVector& theta, double x_prev,
                                           std::size_t step, RngStream& rng) const {
  const double eta = base_->sample_latent_noise(theta, rng);
  return base_->state_from_noise(theta, x_prev, eta, step);
}
double CollapsedHmmView::sample_obs(const ParameterVector& theta, double x,
                                    RngStream& rng) const {
  const double phi = base_->sample_obs_noise(theta, rng);
  return base_->obs_from_noise(theta, x, phi);
}

// --- perturb_noisy -----------------------------------------------------------------

ObservationSeries perturb_noisy(const ObservationSeries& y, double eps, RngStream& rng) {
  if (!(eps > 0.0)) throw std::domain_error("perturb_noisy: eps must be positive");
  if (y.kind == ObservationSeries::Kind::perturbed)
    throw std::invalid_argument("perturb_noisy: series is already perturbed");
  ObservationSeries z = y;
  z.kind = ObservationSeries::Kind::perturbed;
  for (std::size_t i = 0; i < y.n; ++i) {
    const auto zi = sample_uniform_ball(rng, std::span<const double>(y.row(i), y.dim), eps);
    for (std::size_t j = 0; j < y.dim; ++j) z(i, j) = zi[j];
  }
  return z;
}

// --- Proposal ----------------------------------------------------------------------

std::pair<ParameterVector, double> Proposal::propose(const ParameterVector& theta,
                                                     RngStream& rng) const {
  if (components.size() != theta.dim())
    throw std::invalid_argument("propose: component count does not match theta");
  ParameterVector out = theta;
  double log_q_ratio = 0.0;
  for (std::size_t j = 0; j < components.size(); ++j) {
    const auto& c = components[j];
    if (c.scale == 0.0) continue;
    switch (c.kind) {
      case ProposalComponent::Kind::random_walk:
        out[j] = theta[j] + c.scale * sample_gaussian(rng, 0.0, 1.0);
        break;
      case ProposalComponent::Kind::log_random_walk:
        out[j] = theta[j] * std::exp(c.scale * sample_gaussian(rng, 0.0, 1.0));
        // q(theta'|theta) carries a 1/theta' Jacobian, so the ratio picks up
        // log theta' - log theta.
        log_q_ratio += std::log(out[j]) - std::log(theta[j]);
        break;
      case ProposalComponent::Kind::gamma_moment: {
        // Moment-matched gamma: mean = current point, variance = scale^2.
        const double var = c.scale * c.scale;
        const double shape_fwd = theta[j] * theta[j] / var;
        const double rate_fwd = theta[j] / var;
        out[j] = sample_gamma(rng, shape_fwd, rate_fwd);
        const double shape_rev = out[j] * out[j] / var;
        const double rate_rev = out[j] / var;
        log_q_ratio += gamma_logpdf(theta[j], shape_rev, rate_rev) -
                       gamma_logpdf(out[j], shape_fwd, rate_fwd);
        break;
      }
    }
  }
  return {std::move(out), log_q_ratio};
}

Proposal Proposal::random_walk(std::size_t dim, double scale) {
  Proposal p;
  p.components.assign(dim, ProposalComponent{ProposalComponent::Kind::random_walk, scale});
  return p;
}
Proposal Proposal::log_random_walk(std::size_t dim, double scale) {
  Proposal p;
  p.components.assign(dim, ProposalComponent{ProposalComponent::Kind::log_random_walk, scale});
  return p;
}

// --- registry ----------------------------------------------------------------------

namespace {
double take(std::map<std::string, double>& m, const std::string& key, double fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  const double v = it->second;
  m.erase(it);
  return v;
}
}  // namespace

std::shared_ptr<Model> make_model(const std::string& id,
                                  const std::map<std::string, double>& overrides) {
  std::map<std::string, double> rest = overrides;
  std::shared_ptr<Model> model;
  if (id == "normal_location") {
    model = std::make_shared<NormalLocationModel>();
  } else if (id == "gaussian_scale") {
    model = std::make_shared<GaussianScaleModel>();
  } else if (id == "garch") {
    GarchModel::Config cfg;
    cfg.stable_alpha = take(rest, "s1", cfg.stable_alpha);
    cfg.stable_skew = take(rest, "s2", cfg.stable_skew);
    cfg.prior_a = take(rest, "a", cfg.prior_a);
    cfg.prior_b = take(rest, "b", cfg.prior_b);
    cfg.prior_c = take(rest, "c", cfg.prior_c);
    cfg.prior_d = take(rest, "d", cfg.prior_d);
    cfg.y0 = take(rest, "y0", cfg.y0);
    model = std::make_shared<GarchModel>(cfg);
  } else if (id == "sv") {
    SvModel::Config cfg;
    cfg.stable_scale = take(rest, "s1", cfg.stable_scale);
    cfg.stable_alpha = take(rest, "s2", cfg.stable_alpha);
    cfg.stable_skew = take(rest, "s3", cfg.stable_skew);
    model = std::make_shared<SvModel>(cfg);
  } else if (id == "toy_hmm") {
    ToyHmmModel::Config cfg;
    cfg.sigma0 = take(rest, "sigma0", cfg.sigma0);
    cfg.sigma_y = take(rest, "sigma_y", cfg.sigma_y);
    model = std::make_shared<ToyHmmModel>(cfg);
  } else {
    throw ConfigError("model: unknown model id '" + id + "'");
  }
  if (!rest.empty())
    throw ConfigError("model." + rest.begin()->first + ": unknown constant for model '" + id +
                      "'");
  return model;
}

}  // namespace tsabc
