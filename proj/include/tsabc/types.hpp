#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace tsabc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-component support constraint of a parameter.
struct ParamSupport {
  enum class Kind { real, positive, interval };
  Kind kind = Kind::real;
  double lo = 0.0;  // interval bounds, used when kind == interval
  double hi = 0.0;

  bool contains(double v) const {
    switch (kind) {
      case Kind::real:
        return true;
      case Kind::positive:
        return v > 0.0;
      case Kind::interval:
        return v > lo && v < hi;
    }
    return false;
  }
  static ParamSupport real() { return {Kind::real, 0.0, 0.0}; }
  static ParamSupport positive() { return {Kind::positive, 0.0, 0.0}; }
  static ParamSupport interval(double lo, double hi) { return {Kind::interval, lo, hi}; }
};

struct ParameterVector {
  std::vector<double> values;
  std::vector<std::string> names;
  std::vector<ParamSupport> support;

  std::size_t dim() const { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
  double& operator[](std::size_t j) { return values[j]; }

  bool in_support() const {
    for (std::size_t j = 0; j < values.size(); ++j)
      if (!support[j].contains(values[j])) return false;
    return true;
  }
};

// A d_y-dimensional time series, row-major (n rows, dim columns). `kind`
// records whether the entries are raw observations or their noisy-ABC
// perturbations.
struct ObservationSeries {
  enum class Kind { raw, perturbed };

  std::size_t n = 0;
  std::size_t dim = 1;
  std::vector<double> data;  // n * dim, row-major
  Kind kind = Kind::raw;

  double operator()(std::size_t i, std::size_t j) const { return data[i * dim + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data[i * dim + j]; }
  const double* row(std::size_t i) const { return data.data() + i * dim; }

  // Scalar accessor for the d_y = 1 models this library ships.
  double scalar(std::size_t i) const { return data[i]; }

  static ObservationSeries from_scalars(std::vector<double> values, Kind kind = Kind::raw) {
    ObservationSeries s;
    s.n = values.size();
    s.dim = 1;
    s.data = std::move(values);
    s.kind = kind;
    return s;
  }
};

// Latent-state path attached to a simulated series (volatility recursion for
// observation-driven models, hidden chain for HMMs); empty for i.i.d. models.
struct LatentPath {
  std::vector<double> states;
  bool empty() const { return states.empty(); }
  std::size_t size() const { return states.size(); }
};

// Driving-noise coordinates of the collapsed representation: observation
// noise phi_{1:n}, plus latent noise eta_{1:n} for hidden Markov models.
struct CollapsedState {
  std::vector<double> obs_noise;
  std::vector<double> latent_noise;
};

}  // namespace tsabc
