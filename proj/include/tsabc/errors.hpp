#pragma once

#include <stdexcept>
#include <string>

namespace tsabc {

// Raised when an algorithm needs a model capability (pointwise density,
// noise-space maps, ...) that the model does not provide.
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration / input-file problems. `what()` names the offending key or line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Chain or filter initialization could not reach a valid starting state.
class InitError : public std::runtime_error {
 public:
  explicit InitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tsabc
