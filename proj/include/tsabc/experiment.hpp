#pragma once

#include <string>
#include <vector>

#include "tsabc/config.hpp"

namespace tsabc {

enum class RunMode { simulate, mcmc, filter, pmmh };

// Executes one experiment, writing its artifact set under cfg.out_dir:
// data.csv / latent.csv (synthetic runs), perturbed.csv (noisy runs),
// trace.csv or trace_<i>.csv, filter.csv, summary.json, and acf.csv/kde.csv
// when out.diagnostics is on. Every file is a pure function of
// (config, seed); wall-clock timings go to stdout only.
// Returns the list of files written (paths relative to out_dir).
std::vector<std::string> run_experiment(const ExperimentConfig& cfg, RunMode mode);

// Reads a trace CSV and writes acf.csv, kde.csv and summary.json to out_dir.
void diagnose_trace(const std::string& trace_path, const std::string& out_dir,
                    std::size_t max_lag, std::size_t kde_points);

// Stream layout: every run derives all randomness from RngStream(seed) via
// fixed substream tags, so reruns are byte-identical.
inline constexpr std::uint64_t kDataStreamTag = 1;
inline constexpr std::uint64_t kPerturbStreamTag = 2;
inline constexpr std::uint64_t kFilterStreamTag = 3;
inline constexpr std::uint64_t kChainStreamTag = 100;  // chain i: tag + i

}  // namespace tsabc
