#pragma once

#include <stdexcept>
#include <string>

namespace sddo {

// Bad user input: malformed config files, out-of-range arguments.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An algorithm failed to reach its accuracy target (quadrature that did not
// converge, a degenerate test statistic). Distinct from domain errors so
// callers can map it to a different exit status.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sddo
