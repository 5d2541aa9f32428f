#include "tsabc/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "tsabc/errors.hpp"
#include "tsabc/io.hpp"

namespace tsabc {

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::marginal: return "marginal";
    case Algorithm::naive: return "naive";
    case Algorithm::ntrials: return "ntrials";
    case Algorithm::nhit: return "nhit";
    case Algorithm::collapsed: return "collapsed";
    case Algorithm::smc: return "smc";
    case Algorithm::alive: return "alive";
    case Algorithm::pmmh_standard: return "pmmh-standard";
    case Algorithm::pmmh_alive: return "pmmh-alive";
    case Algorithm::collapsed_pmmh: return "collapsed-pmmh";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& s) {
  for (Algorithm a :
       {Algorithm::marginal, Algorithm::naive, Algorithm::ntrials, Algorithm::nhit,
        Algorithm::collapsed, Algorithm::smc, Algorithm::alive, Algorithm::pmmh_standard,
        Algorithm::pmmh_alive, Algorithm::collapsed_pmmh})
    if (to_string(a) == s) return a;
  throw ConfigError("algorithm: unknown algorithm '" + s + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  const char* s = value.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s || *end != '\0')
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& value) {
  const double v = parse_double(key, value);
  if (v != std::floor(v)) throw ConfigError(key + ": expected an integer, got '" + value + "'");
  return static_cast<long long>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(parse_double(key, trim(cell)));
  if (out.empty()) throw ConfigError(key + ": expected a comma-separated list");
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

void check_algorithm_model(const ExperimentConfig& cfg) {
  if (!cfg.algorithm || cfg.model_id.empty()) return;
  const auto model = make_model(cfg.model_id, cfg.model_constants);
  const bool needs_hmm = *cfg.algorithm == Algorithm::smc || *cfg.algorithm == Algorithm::alive ||
                         *cfg.algorithm == Algorithm::pmmh_standard ||
                         *cfg.algorithm == Algorithm::pmmh_alive ||
                         *cfg.algorithm == Algorithm::collapsed_pmmh;
  const bool is_hmm = model->kind() == ModelKind::hmm;
  if (needs_hmm && !is_hmm)
    throw ConfigError("algorithm: '" + to_string(*cfg.algorithm) +
                      "' needs a hidden Markov model, but '" + cfg.model_id + "' is not one");
  if (!needs_hmm && is_hmm)
    throw ConfigError("algorithm: '" + to_string(*cfg.algorithm) +
                      "' targets factorized (i.i.d./observation-driven) models, but '" +
                      cfg.model_id + "' is a hidden Markov model");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");

    if (key == "model") {
      cfg.model_id = value;
    } else if (starts_with(key, "model.")) {
      cfg.model_constants[key.substr(6)] = parse_double(key, value);
    } else if (key == "abc.eps") {
      cfg.eps = parse_double(key, value);
      if (!(cfg.eps > 0.0)) throw ConfigError("abc.eps: must be positive");
    } else if (key == "abc.noisy") {
      cfg.noisy = parse_bool(key, value);
    } else if (key == "algorithm") {
      cfg.algorithm = algorithm_from_string(value);
    } else if (key == "mcmc.iterations") {
      const long long v = parse_int(key, value);
      if (v < 1) throw ConfigError("mcmc.iterations: must be >= 1");
      cfg.iterations = static_cast<std::size_t>(v);
    } else if (key == "mcmc.n_trials") {
      const long long v = parse_int(key, value);
      if (v < 1) throw ConfigError("mcmc.n_trials: must be >= 1");
      cfg.n_trials = static_cast<std::uint32_t>(v);
    } else if (key == "mcmc.cap") {
      const long long v = parse_int(key, value);
      if (v < 1) throw ConfigError("mcmc.cap: must be >= 1");
      cfg.cap = v;
    } else if (key == "mcmc.early_reject") {
      cfg.early_reject = parse_bool(key, value);
    } else if (key == "smc.particles") {
      const long long v = parse_int(key, value);
      if (v < 1) throw ConfigError("smc.particles: must be >= 1");
      cfg.particles = static_cast<std::size_t>(v);
    } else if (key == "proposal.scale") {
      cfg.proposal_scales[""] = parse_double(key, value);
    } else if (starts_with(key, "proposal.scale.")) {
      cfg.proposal_scales[key.substr(15)] = parse_double(key, value);
    } else if (key == "proposal.kind") {
      cfg.proposal_kinds[""] = value;
    } else if (starts_with(key, "proposal.kind.")) {
      cfg.proposal_kinds[key.substr(14)] = value;
    } else if (key == "init.theta") {
      cfg.init_theta = parse_list(key, value);
    } else if (key == "seed") {
      const long long v = parse_int(key, value);
      if (v < 0) throw ConfigError("seed: must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else if (key == "data.path") {
      cfg.data_path = value;
    } else if (key == "data.synthetic.n") {
      const long long v = parse_int(key, value);
      if (v < 1) throw ConfigError("data.synthetic.n: must be >= 1");
      cfg.synth_n = static_cast<std::size_t>(v);
    } else if (key == "data.synthetic.params") {
      cfg.synth_params = parse_list(key, value);
    } else if (key == "out.dir") {
      cfg.out_dir = value;
    } else if (key == "out.diagnostics") {
      cfg.emit_diagnostics = parse_bool(key, value);
    } else if (key == "diagnose.max_lag") {
      const long long v = parse_int(key, value);
      if (v < 1) throw ConfigError("diagnose.max_lag: must be >= 1");
      cfg.acf_max_lag = static_cast<std::size_t>(v);
    } else if (key == "diagnose.kde_points") {
      const long long v = parse_int(key, value);
      if (v < 8) throw ConfigError("diagnose.kde_points: must be >= 8");
      cfg.kde_points = static_cast<std::size_t>(v);
    } else if (key == "chains") {
      const long long v = parse_int(key, value);
      if (v < 1) throw ConfigError("chains: must be >= 1");
      cfg.chains = static_cast<std::size_t>(v);
    } else if (key == "threads") {
      const long long v = parse_int(key, value);
      if (v < 0) throw ConfigError("threads: must be >= 0");
      cfg.threads = static_cast<int>(v);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (cfg.model_id.empty()) throw ConfigError("model: required key is missing");
  check_algorithm_model(cfg);
  if (cfg.init_theta) {
    const auto model = make_model(cfg.model_id, cfg.model_constants);
    if (cfg.init_theta->size() != model->param_dim())
      throw ConfigError("init.theta: expected " + std::to_string(model->param_dim()) +
                        " values for model '" + cfg.model_id + "'");
  }
  if (cfg.synth_params) {
    const auto model = make_model(cfg.model_id, cfg.model_constants);
    if (cfg.synth_params->size() != model->param_dim())
      throw ConfigError("data.synthetic.params: expected " + std::to_string(model->param_dim()) +
                        " values for model '" + cfg.model_id + "'");
  }
  return cfg;
}

namespace {
std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += format_double(v[i]);
  }
  return out;
}
}  // namespace

std::string to_text(const ExperimentConfig& cfg) {
  std::string out;
  out += "model = " + cfg.model_id + "\n";
  for (const auto& [k, v] : cfg.model_constants) out += "model." + k + " = " + format_double(v) + "\n";
  if (cfg.eps > 0.0) out += "abc.eps = " + format_double(cfg.eps) + "\n";
  out += std::string("abc.noisy = ") + (cfg.noisy ? "true" : "false") + "\n";
  if (cfg.algorithm) out += "algorithm = " + to_string(*cfg.algorithm) + "\n";
  out += "mcmc.iterations = " + std::to_string(cfg.iterations) + "\n";
  if (cfg.n_trials > 0) out += "mcmc.n_trials = " + std::to_string(cfg.n_trials) + "\n";
  out += "mcmc.cap = " + std::to_string(cfg.cap) + "\n";
  out += std::string("mcmc.early_reject = ") + (cfg.early_reject ? "true" : "false") + "\n";
  if (cfg.particles > 0) out += "smc.particles = " + std::to_string(cfg.particles) + "\n";
  for (const auto& [k, v] : cfg.proposal_scales)
    out += (k.empty() ? "proposal.scale" : "proposal.scale." + k) + " = " + format_double(v) + "\n";
  for (const auto& [k, v] : cfg.proposal_kinds)
    out += (k.empty() ? "proposal.kind" : "proposal.kind." + k) + " = " + v + "\n";
  if (cfg.init_theta) out += "init.theta = " + list_text(*cfg.init_theta) + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  if (!cfg.data_path.empty()) out += "data.path = " + cfg.data_path + "\n";
  if (cfg.synth_n > 0) out += "data.synthetic.n = " + std::to_string(cfg.synth_n) + "\n";
  if (cfg.synth_params) out += "data.synthetic.params = " + list_text(*cfg.synth_params) + "\n";
  out += "out.dir = " + cfg.out_dir + "\n";
  out += std::string("out.diagnostics = ") + (cfg.emit_diagnostics ? "true" : "false") + "\n";
  out += "diagnose.max_lag = " + std::to_string(cfg.acf_max_lag) + "\n";
  out += "diagnose.kde_points = " + std::to_string(cfg.kde_points) + "\n";
  out += "chains = " + std::to_string(cfg.chains) + "\n";
  out += "threads = " + std::to_string(cfg.threads) + "\n";
  return out;
}

std::map<std::string, double> model_default_constants(const std::string& id) {
  if (id == "garch")
    return {{"s1", 1.5}, {"s2", 0.0}, {"a", 2.0}, {"b", 0.125},
            {"c", 2.0},  {"d", 0.125}, {"y0", 0.0}};
  if (id == "sv") return {{"s1", 1.0}, {"s2", 1.75}, {"s3", 1.0}};
  if (id == "toy_hmm") return {{"sigma0", 1.0}, {"sigma_y", 1.0}};
  return {};
}

std::uint32_t resolve_n_trials(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.n_trials > 0) return cfg.n_trials;
  // N = O(n) guidance: half the data size, at least 2.
  return static_cast<std::uint32_t>(std::max<std::size_t>(2, (n + 1) / 2));
}

std::size_t resolve_particles(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.particles > 0) return cfg.particles;
  return std::max<std::size_t>(2, n);  // N = O(n) guidance
}

Proposal make_proposal(const Model& model, const ExperimentConfig& cfg) {
  const auto names = model.param_names();
  const auto support = model.param_support();
  Proposal proposal;
  proposal.components.resize(names.size());
  for (std::size_t j = 0; j < names.size(); ++j) {
    ProposalComponent& comp = proposal.components[j];
    // Model defaults: plain random walk on the reals, log-scale walk on
    // positive components; the stochastic-volatility variance/AR components
    // use the moment-matched gamma proposal.
    comp.kind = support[j].kind == ParamSupport::Kind::positive
                    ? ProposalComponent::Kind::log_random_walk
                    : ProposalComponent::Kind::random_walk;
    comp.scale = support[j].kind == ParamSupport::Kind::positive ? 0.25 : 0.5;
    if (dynamic_cast<const SvModel*>(&model) != nullptr && j >= 1) {
      comp.kind = ProposalComponent::Kind::gamma_moment;
      comp.scale = 0.02;
    }
    auto kind_it = cfg.proposal_kinds.find(names[j]);
    if (kind_it == cfg.proposal_kinds.end()) kind_it = cfg.proposal_kinds.find("");
    if (kind_it != cfg.proposal_kinds.end()) {
      const std::string& kind = kind_it->second;
      if (kind == "rw")
        comp.kind = ProposalComponent::Kind::random_walk;
      else if (kind == "logrw")
        comp.kind = ProposalComponent::Kind::log_random_walk;
      else if (kind == "gamma")
        comp.kind = ProposalComponent::Kind::gamma_moment;
      else
        throw ConfigError("proposal.kind: expected rw|logrw|gamma, got '" + kind + "'");
    }
    auto scale_it = cfg.proposal_scales.find(names[j]);
    if (scale_it == cfg.proposal_scales.end()) scale_it = cfg.proposal_scales.find("");
    if (scale_it != cfg.proposal_scales.end()) {
      if (scale_it->second < 0.0) throw ConfigError("proposal.scale: must be non-negative");
      comp.scale = scale_it->second;
    }
  }
  return proposal;
}

}  // namespace tsabc
