#include <cmath>
#include "tsabc/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <thread>

#include <json.hpp>

#include "tsabc/diagnostics.hpp"
#include "tsabc/io.hpp"
#include "tsabc/pmmh.hpp"

namespace tsabc {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json config_json(const ExperimentConfig& cfg, std::size_t n, std::uint32_t n_trials,
                         std::size_t particles) {
  ordered_json j;
  j["model"] = cfg.model_id;
  ordered_json constants;
  auto merged = model_default_constants(cfg.model_id);
  for (const auto& [k, v] : cfg.model_constants) merged[k] = v;
  for (const auto& [k, v] : merged) constants[k] = v;
  j["model_constants"] = constants;
  j["abc"] = {{"eps", cfg.eps}, {"noisy", cfg.noisy}};
  if (cfg.algorithm) j["algorithm"] = to_string(*cfg.algorithm);
  j["mcmc"] = {{"iterations", cfg.iterations},
               {"n_trials", n_trials},
               {"cap", cfg.cap},
               {"early_reject", cfg.early_reject}};
  j["smc"] = {{"particles", particles}};
  ordered_json scales, kinds;
  for (const auto& [k, v] : cfg.proposal_scales) scales[k.empty() ? "*" : k] = v;
  for (const auto& [k, v] : cfg.proposal_kinds) kinds[k.empty() ? "*" : k] = v;
  j["proposal"] = {{"scales", scales}, {"kinds", kinds}};
  if (cfg.init_theta) j["init_theta"] = *cfg.init_theta;
  j["seed"] = cfg.seed;
  j["data"] = {{"path", cfg.data_path},
               {"synthetic_n", cfg.synth_n},
               {"n", n}};
  if (cfg.synth_params) j["data"]["synthetic_params"] = *cfg.synth_params;
  j["out"] = {{"dir", cfg.out_dir}, {"diagnostics", cfg.emit_diagnostics}};
  j["diagnose"] = {{"max_lag", cfg.acf_max_lag}, {"kde_points", cfg.kde_points}};
  j["chains"] = cfg.chains;
  j["threads"] = cfg.threads;
  return j;
}

ordered_json summary_json(const TraceSummary& s) {
  ordered_json j;
  j["acceptance_rate"] = s.acceptance_rate;
  j["iterations"] = s.iterations;
  j["cap_events"] = s.cap_events;
  ordered_json params = ordered_json::array();
  for (const auto& p : s.params) {
    params.push_back({{"name", p.name},
                      {"mean", p.mean},
                      {"sd", p.sd},
                      {"q05", p.q05},
                      {"q50", p.q50},
                      {"q95", p.q95},
                      {"ess", p.ess}});
  }
  j["params"] = params;
  return j;
}

struct PreparedData {
  ObservationSeries raw;         // as loaded or simulated
  ObservationSeries inference;   // raw or its noisy perturbation
  LatentPath latent;
  bool synthetic = false;
};

PreparedData prepare_data(const ExperimentConfig& cfg, const Model& model, bool need_eps) {
  PreparedData d;
  if (!cfg.data_path.empty()) {
    d.raw = load_csv(cfg.data_path);
  } else if (cfg.synth_n > 0) {
    RngStream data_rng = RngStream(cfg.seed).substream(kDataStreamTag);
    const ParameterVector truth = cfg.synth_params
                                      ? model.params_from_values(*cfg.synth_params)
                                      : model.default_params();
    auto sim = model.simulate(truth, cfg.synth_n, data_rng);
    d.raw = std::move(sim.obs);
    d.latent = std::move(sim.latent);
    d.synthetic = true;
  } else {
    throw ConfigError("data.path: either a CSV path or data.synthetic.n is required");
  }
  if (cfg.noisy) {
    if (!(cfg.eps > 0.0)) throw ConfigError("abc.eps: required for a noisy run");
    RngStream perturb_rng = RngStream(cfg.seed).substream(kPerturbStreamTag);
    d.inference = perturb_noisy(d.raw, cfg.eps, perturb_rng);
  } else {
    d.inference = d.raw;
  }
  if (need_eps && !(cfg.eps > 0.0)) throw ConfigError("abc.eps: required and must be positive");
  return d;
}

void emit_trace_diagnostics(const Trace& trace, const ExperimentConfig& cfg, const fs::path& dir,
                            std::vector<std::string>& files) {
  // Long-format CSVs, one block per parameter.
  std::string acf_text = "param,lag,acf\n";
  std::string kde_text = "param,grid,density\n";
  for (std::size_t j = 0; j < trace.dim; ++j) {
    const auto col = trace.column(j);
    const std::size_t max_lag = std::min(cfg.acf_max_lag, trace.iterations - 1);
    bool constant = true;
    for (double v : col)
      if (v != col.front()) constant = false;
    if (constant || max_lag < 1) continue;
    const auto acf = autocorrelation(std::span<const double>(col), max_lag);
    for (std::size_t k = 0; k < acf.acf.size(); ++k)
      acf_text += trace.param_names[j] + "," + std::to_string(k) + "," +
                  format_double(acf.acf[k]) + "\n";
    const double h = silverman_bandwidth(std::span<const double>(col));
    const auto [mn_it, mx_it] = std::minmax_element(col.begin(), col.end());
    const auto est = kde(std::span<const double>(col),
                         linspace(*mn_it - 3 * h, *mx_it + 3 * h, cfg.kde_points), h);
    for (std::size_t g = 0; g < est.grid.size(); ++g)
      kde_text += trace.param_names[j] + "," + format_double(est.grid[g]) + "," +
                  format_double(est.density[g]) + "\n";
  }
  write_file((dir / "acf.csv").string(), acf_text);
  write_file((dir / "kde.csv").string(), kde_text);
  files.push_back("acf.csv");
  files.push_back("kde.csv");
}

Trace run_one_chain(const ExperimentConfig& cfg, const Model& model, const FactorizedLaw& law,
                    Algorithm algo, std::uint32_t n_trials, int threads, RngStream rng) {
  const AbcKernel kernel(cfg.eps, 1);
  const Proposal proposal = make_proposal(model, cfg);
  InitOptions init;
  init.theta0 = cfg.init_theta;
  init.cap = cfg.cap;
  switch (algo) {
    case Algorithm::marginal: {
      MarginalMh k(law, model, kernel, proposal, 4097);
      return run_chain(k, k.init(init, rng), cfg.iterations, rng);
    }
    case Algorithm::naive: {
      NaiveAbcMh k(law, model, kernel, proposal, cfg.early_reject, threads);
      return run_chain(k, k.init(init, rng), cfg.iterations, rng);
    }
    case Algorithm::ntrials: {
      NTrialsMh k(law, model, kernel, proposal, n_trials, threads);
      return run_chain(k, k.init(init, rng), cfg.iterations, rng);
    }
    case Algorithm::nhit: {
      NHitMh k(law, model, kernel, proposal, std::max<std::uint32_t>(2, n_trials), cfg.cap,
               threads);
      return run_chain(k, k.init(init, rng), cfg.iterations, rng);
    }
    case Algorithm::collapsed: {
      CollapsedMh k(law, model, kernel, proposal, true, threads);
      return run_chain(k, k.init(init, rng), cfg.iterations, rng);
    }
    default:
      throw ConfigError("algorithm: not an MCMC algorithm");
  }
}

Trace run_one_pmmh(const ExperimentConfig& cfg, const HmmModel& model,
                   std::shared_ptr<const HmmModel> shared_model, const ObservationSeries& y,
                   Algorithm algo, std::size_t particles, int threads, RngStream rng) {
  FilterOptions fopts;
  fopts.particles = particles;
  fopts.kernel = AbcKernel(cfg.eps, 1);
  fopts.cap = cfg.cap;
  fopts.threads = threads;
  const Proposal proposal = make_proposal(model, cfg);
  InitOptions init;
  init.theta0 = cfg.init_theta;
  init.cap = cfg.cap;
  switch (algo) {
    case Algorithm::pmmh_standard:
      return run_pmmh(model, y, FilterKind::standard, fopts, proposal, init, cfg.iterations, rng);
    case Algorithm::pmmh_alive:
      return run_pmmh(model, y, FilterKind::alive, fopts, proposal, init, cfg.iterations, rng);
    case Algorithm::collapsed_pmmh:
      return run_collapsed_pmmh(shared_model, y, FilterKind::alive, fopts, proposal, init,
                                cfg.iterations, rng);
    default:
      throw ConfigError("algorithm: not a PMMH algorithm");
  }
}

// Fan the chains out over worker threads; inner kernels run serial when more
// than one chain shares the machine.
std::vector<Trace> run_chains(const ExperimentConfig& cfg,
                              const std::function<Trace(std::size_t, int)>& one) {
  const std::size_t k = cfg.chains;
  const int inner_threads = k > 1 ? 1 : cfg.threads;
  std::vector<Trace> traces(k);
  if (k == 1) {
    traces[0] = one(0, inner_threads);
    return traces;
  }
  std::vector<std::exception_ptr> errors(k);
  std::vector<std::thread> workers;
  workers.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    workers.emplace_back([&, i] {
      try {
        traces[i] = one(i, inner_threads);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return traces;
}

}  // namespace

std::vector<std::string> run_experiment(const ExperimentConfig& cfg, RunMode mode) {
  const auto model = make_model(cfg.model_id, cfg.model_constants);
  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  std::vector<std::string> files;

  const bool need_eps = mode != RunMode::simulate;
  if (mode == RunMode::simulate && cfg.synth_n == 0)
    throw ConfigError("data.synthetic.n: required by the simulate subcommand");
  PreparedData data = prepare_data(cfg, *model, need_eps);
  if (mode != RunMode::simulate) {
    for (double v : data.inference.data)
      if (!std::isfinite(v))
        throw std::runtime_error(
            "data: the synthetic series contains non-finite values (the simulated recursion "
            "exploded); pick a contractive truth or another seed");
  }

  if (data.synthetic) {
    write_series_csv(data.raw, (dir / "data.csv").string(), "y");
    files.push_back("data.csv");
    if (!data.latent.empty()) {
      write_latent_csv(data.latent, (dir / "latent.csv").string());
      files.push_back("latent.csv");
    }
  }
  if (cfg.noisy) {
    write_series_csv(data.inference, (dir / "perturbed.csv").string(), "z");
    files.push_back("perturbed.csv");
  }

  ordered_json summary;
  const std::size_t n = data.inference.n;
  const std::uint32_t n_trials = resolve_n_trials(cfg, n);
  const std::size_t particles = resolve_particles(cfg, n);
  summary["config"] = config_json(cfg, n, n_trials, particles);
  summary["data"] = {{"n", n},
                     {"dim", data.inference.dim},
                     {"source", data.synthetic ? "synthetic" : "csv"},
                     {"noisy", cfg.noisy}};

  const auto t0 = std::chrono::steady_clock::now();
  double per_iteration = 0.0;

  switch (mode) {
    case RunMode::simulate:
      break;

    case RunMode::mcmc: {
      if (!cfg.algorithm) throw ConfigError("algorithm: required by the mcmc subcommand");
      const Algorithm algo = *cfg.algorithm;
      if (algo != Algorithm::marginal && algo != Algorithm::naive &&
          algo != Algorithm::ntrials && algo != Algorithm::nhit &&
          algo != Algorithm::collapsed)
        throw ConfigError("algorithm: '" + to_string(algo) + "' is not an mcmc algorithm");
      auto* fact = dynamic_cast<const FactorizedModel*>(model.get());
      if (fact == nullptr)
        throw ConfigError("algorithm: model '" + cfg.model_id + "' is not factorizable");
      if (data.inference.dim != 1)
        throw ConfigError("data: the samplers require a scalar series");
      const auto law = fact->make_law(data.inference);
      auto traces = run_chains(cfg, [&](std::size_t i, int threads) {
        RngStream rng = RngStream(cfg.seed).substream(kChainStreamTag + i);
        return run_one_chain(cfg, *model, *law, algo, n_trials, threads, std::move(rng));
      });
      ordered_json chains = ordered_json::array();
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const std::string name = traces.size() == 1 ? "trace.csv" : "trace_" + std::to_string(i) + ".csv";
        write_trace_csv(traces[i], (dir / name).string());
        files.push_back(name);
        chains.push_back(summary_json(summarize(traces[i])));
      }
      summary["chains"] = chains;
      if (cfg.emit_diagnostics) emit_trace_diagnostics(traces[0], cfg, dir, files);
      per_iteration = static_cast<double>(cfg.iterations * traces.size());
      break;
    }

    case RunMode::filter: {
      if (!cfg.algorithm) throw ConfigError("algorithm: required by the filter subcommand");
      const Algorithm algo = *cfg.algorithm;
      if (algo != Algorithm::smc && algo != Algorithm::alive)
        throw ConfigError("algorithm: the filter subcommand runs 'smc' or 'alive'");
      auto* hmm = dynamic_cast<const HmmModel*>(model.get());
      if (hmm == nullptr)
        throw ConfigError("algorithm: model '" + cfg.model_id + "' is not a hidden Markov model");
      const ParameterVector theta = cfg.init_theta
                                        ? model->params_from_values(*cfg.init_theta)
                                        : model->default_params();
      FilterOptions fopts;
      fopts.particles = particles;
      fopts.kernel = AbcKernel(cfg.eps, 1);
      fopts.cap = cfg.cap;
      fopts.threads = cfg.threads;
      RngStream rng = RngStream(cfg.seed).substream(kFilterStreamTag);
      const FilterResult result = algo == Algorithm::smc
                                      ? smc_abc_filter(*hmm, theta, data.inference, fopts, rng)
                                      : alive_smc_filter(*hmm, theta, data.inference, fopts, rng);
      write_filter_csv(result, algo == Algorithm::alive, (dir / "filter.csv").string());
      files.push_back("filter.csv");
      ordered_json fj;
      fj["log_nc"] = result.nc.log_value;
      fj["steps"] = result.history.size();
      fj["theta"] = theta.values;
      if (result.nc.collapsed_at) fj["collapsed_at"] = *result.nc.collapsed_at;
      fj["cap_failed"] = result.cap_failed;
      if (result.cap_failed) fj["cap_failed_at"] = result.cap_failed_at;
      summary["filter"] = fj;
      per_iteration = static_cast<double>(data.inference.n);
      break;
    }

    case RunMode::pmmh: {
      if (!cfg.algorithm) throw ConfigError("algorithm: required by the pmmh subcommand");
      const Algorithm algo = *cfg.algorithm;
      if (algo != Algorithm::pmmh_standard && algo != Algorithm::pmmh_alive &&
          algo != Algorithm::collapsed_pmmh)
        throw ConfigError("algorithm: the pmmh subcommand runs pmmh-standard, pmmh-alive or "
                          "collapsed-pmmh");
      std::shared_ptr<const HmmModel> hmm = std::dynamic_pointer_cast<HmmModel>(model);
      if (!hmm)
        throw ConfigError("algorithm: model '" + cfg.model_id + "' is not a hidden Markov model");
      auto traces = run_chains(cfg, [&](std::size_t i, int threads) {
        RngStream rng = RngStream(cfg.seed).substream(kChainStreamTag + i);
        return run_one_pmmh(cfg, *hmm, hmm, data.inference, algo, particles, threads,
                            std::move(rng));
      });
      ordered_json chains = ordered_json::array();
      for (std::size_t i = 0; i < traces.size(); ++i) {
        const std::string name = traces.size() == 1 ? "trace.csv" : "trace_" + std::to_string(i) + ".csv";
        write_trace_csv(traces[i], (dir / name).string());
        files.push_back(name);
        chains.push_back(summary_json(summarize(traces[i])));
      }
      summary["chains"] = chains;
      if (cfg.emit_diagnostics) emit_trace_diagnostics(traces[0], cfg, dir, files);
      per_iteration = static_cast<double>(cfg.iterations * traces.size());
      break;
    }
  }

  const auto t1 = std::chrono::steady_clock::now();
  const double elapsed = std::chrono::duration<double>(t1 - t0).count();
  // Timing is reported on stdout only, keeping every artifact byte-stable
  // under a fixed (config, seed).
  if (per_iteration > 0.0)
    std::printf("wall-clock %.3f s, %.6f s/iteration\n", elapsed, elapsed / per_iteration);
  else
    std::printf("wall-clock %.3f s\n", elapsed);

  write_file((dir / "summary.json").string(), summary.dump(2) + "\n");
  files.push_back("summary.json");
  return files;
}

void diagnose_trace(const std::string& trace_path, const std::string& out_dir,
                    std::size_t max_lag, std::size_t kde_points) {
  const Trace trace = load_trace_csv(trace_path);
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  ExperimentConfig cfg;
  cfg.acf_max_lag = max_lag;
  cfg.kde_points = kde_points;
  std::vector<std::string> files;
  emit_trace_diagnostics(trace, cfg, dir, files);
  ordered_json summary;
  summary["trace"] = trace_path;
  summary["summary"] = summary_json(summarize(trace));
  write_file((dir / "summary.json").string(), summary.dump(2) + "\n");
}

}  // namespace tsabc
