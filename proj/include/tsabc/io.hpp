#pragma once

#include <string>
#include <vector>

#include "tsabc/mcmc.hpp"
#include "tsabc/smc.hpp"
#include "tsabc/types.hpp"

namespace tsabc {

// 17-significant-digit decimal form; round-trips any double exactly.
std::string format_double(double v);

// One observation row per line, comma-separated columns, optional single
// header line auto-detected by a non-numeric first cell. Errors carry the
// 1-based line number.
ObservationSeries load_csv(const std::string& path);
ObservationSeries parse_csv_text(const std::string& text);

void write_series_csv(const ObservationSeries& series, const std::string& path,
                      const std::string& header = "");
void write_latent_csv(const LatentPath& path_values, const std::string& path);

// Trace rows as `iter,accepted,<param names...>[,extra]`.
void write_trace_csv(const Trace& trace, const std::string& path);
Trace load_trace_csv(const std::string& path);

// Per-step filter rows as `t,log_nc_factor,ess,hits[,m_t]` (the trailing
// column only for the alive filter).
void write_filter_csv(const FilterResult& result, bool alive, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace tsabc
