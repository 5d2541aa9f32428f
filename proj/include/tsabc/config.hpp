#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsabc/models.hpp"

namespace tsabc {

enum class Algorithm {
  marginal,
  naive,
  ntrials,
  nhit,
  collapsed,
  smc,
  alive,
  pmmh_standard,
  pmmh_alive,
  collapsed_pmmh
};

std::string to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& s);  // ConfigError on unknown id

// Flat key-value experiment configuration with dotted section names. Grammar:
// one `key = value` per line, `#` starts a comment, unknown keys are errors.
// See the README for the full key list.
struct ExperimentConfig {
  std::string model_id;
  std::map<std::string, double> model_constants;  // model.<key>

  double eps = 0.0;  // abc.eps; required (> 0) by every inference subcommand
  bool noisy = false;

  std::optional<Algorithm> algorithm;
  std::size_t iterations = 10000;
  std::uint32_t n_trials = 0;  // 0: default rule max(2, round(n/2))
  long long cap = 10'000'000;
  bool early_reject = false;  // basic ABC MCMC: stop simulating at the first miss
  std::size_t particles = 0;  // 0: default rule N = n

  std::map<std::string, double> proposal_scales;       // "" key: global override
  std::map<std::string, std::string> proposal_kinds;   // rw | logrw | gamma

  std::optional<std::vector<double>> init_theta;

  std::uint64_t seed = 1;
  std::string data_path;
  std::size_t synth_n = 0;
  std::optional<std::vector<double>> synth_params;

  std::string out_dir = "out";
  bool emit_diagnostics = false;
  std::size_t acf_max_lag = 200;
  std::size_t kde_points = 256;

  std::size_t chains = 1;
  int threads = 1;  // 0: one per hardware thread
};

ExperimentConfig parse_config(const std::string& text);
std::string to_text(const ExperimentConfig& cfg);

// Default constants a model id ships with (merged under model.<key> overrides
// for the effective-config echo).
std::map<std::string, double> model_default_constants(const std::string& id);

// Materialized defaults that depend on the data size.
std::uint32_t resolve_n_trials(const ExperimentConfig& cfg, std::size_t n);
std::size_t resolve_particles(const ExperimentConfig& cfg, std::size_t n);

// Build the proposal for `model` from per-model defaults plus any
// proposal.scale / proposal.kind overrides.
Proposal make_proposal(const Model& model, const ExperimentConfig& cfg);

}  // namespace tsabc
