#include "tsabc/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tsabc/errors.hpp"

namespace tsabc {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

bool parse_number(const std::string& cell, double& out) {
  const char* s = cell.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  if (end == s) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

}  // namespace

ObservationSeries parse_csv_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  ObservationSeries series;
  bool saw_header_candidate = false;
  std::size_t dim = 0;
  std::vector<double> row;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_commas(line);
    row.clear();
    bool numeric = true;
    for (const auto& cell : cells) {
      double v;
      if (!parse_number(cell, v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      // A single non-numeric leading line is a header; anything later is bad data.
      if (series.n == 0 && !saw_header_candidate) {
        saw_header_candidate = true;
        continue;
      }
      throw ConfigError("csv line " + std::to_string(lineno) + ": non-numeric cell");
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim)
      throw ConfigError("csv line " + std::to_string(lineno) + ": ragged row (expected " +
                        std::to_string(dim) + " columns, got " + std::to_string(row.size()) +
                        ")");
    for (double v : row) {
      if (!std::isfinite(v))
        throw ConfigError("csv line " + std::to_string(lineno) + ": non-finite value");
      series.data.push_back(v);
    }
    ++series.n;
  }
  if (series.n == 0) throw ConfigError("csv: no data rows");
  series.dim = dim;
  return series;
}

ObservationSeries load_csv(const std::string& path) {
  return parse_csv_text(read_file(path));
}

void write_series_csv(const ObservationSeries& series, const std::string& path,
                      const std::string& header) {
  std::string out;
  if (!header.empty()) out += header + "\n";
  for (std::size_t i = 0; i < series.n; ++i) {
    for (std::size_t j = 0; j < series.dim; ++j) {
      if (j) out += ',';
      out += format_double(series(i, j));
    }
    out += '\n';
  }
  write_file(path, out);
}

void write_latent_csv(const LatentPath& path_values, const std::string& path) {
  std::string out = "x\n";
  for (double v : path_values.states) out += format_double(v) + "\n";
  write_file(path, out);
}

void write_trace_csv(const Trace& trace, const std::string& path) {
  std::string out = "iter,accepted";
  for (const auto& name : trace.param_names) out += "," + name;
  if (!trace.extra_name.empty()) out += "," + trace.extra_name;
  out += '\n';
  for (std::size_t t = 0; t < trace.iterations; ++t) {
    out += std::to_string(t + 1);
    out += trace.accepted[t] ? ",1" : ",0";
    for (std::size_t j = 0; j < trace.dim; ++j) out += "," + format_double(trace.draw(t, j));
    if (!trace.extra_name.empty()) out += "," + format_double(trace.extras[t]);
    out += '\n';
  }
  write_file(path, out);
}

Trace load_trace_csv(const std::string& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trace csv: empty file");
  auto header = split_commas(line);
  if (header.size() < 3 || header[0] != "iter" || header[1] != "accepted")
    throw ConfigError("trace csv: expected header iter,accepted,<params...>");
  Trace trace;
  std::size_t cols = header.size();
  // A trailing extras column is recognized by the names this library writes.
  bool has_extra = header.back() == "sum_m" || header.back() == "log_nc";
  if (has_extra) trace.extra_name = header.back();
  trace.dim = cols - 2 - (has_extra ? 1 : 0);
  if (trace.dim == 0) throw ConfigError("trace csv: no parameter columns");
  trace.param_names.assign(header.begin() + 2, header.begin() + 2 + trace.dim);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto cells = split_commas(line);
    if (cells.size() != cols)
      throw ConfigError("trace csv line " + std::to_string(lineno) + ": ragged row");
    double v;
    if (!parse_number(cells[1], v))
      throw ConfigError("trace csv line " + std::to_string(lineno) + ": bad accepted flag");
    trace.accepted.push_back(v != 0.0 ? 1 : 0);
    for (std::size_t j = 0; j < trace.dim; ++j) {
      if (!parse_number(cells[2 + j], v))
        throw ConfigError("trace csv line " + std::to_string(lineno) + ": non-numeric cell");
      trace.draws.push_back(v);
    }
    if (has_extra) {
      if (!parse_number(cells.back(), v))
        throw ConfigError("trace csv line " + std::to_string(lineno) + ": non-numeric cell");
      trace.extras.push_back(v);
    }
    ++trace.iterations;
  }
  if (trace.iterations == 0) throw ConfigError("trace csv: no rows");
  return trace;
}

void write_filter_csv(const FilterResult& result, bool alive, const std::string& path) {
  std::string out = alive ? "t,log_nc_factor,ess,hits,m_t" : "t,log_nc_factor,ess,hits";
  out += '\n';
  for (std::size_t t = 0; t < result.history.size(); ++t) {
    const auto& rec = result.history[t];
    out += std::to_string(t + 1);
    out += "," + format_double(rec.log_factor);
    out += "," + format_double(rec.ess);
    out += "," + std::to_string(rec.hits);
    if (alive) out += "," + std::to_string(rec.trials);
    out += '\n';
  }
  write_file(path, out);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

}  // namespace tsabc
