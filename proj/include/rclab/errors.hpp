#pragma once

#include <stdexcept>
#include <string>

namespace rclab {

// Invalid parameters, malformed configs, violated preconditions.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Divergence, non-convergence, conservation-law violations.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

}  // namespace rclab
