#pragma once

#include <cmath>
#include <stdexcept>

#include "sddo/normal.hpp"

namespace sddo {

/// Schoenfeld event count for a two-arm, equal-allocation survival trial:
/// ceil(4 (z_{1-alpha} + z_{power})^2 / ln(hr_alt)^2).
inline int schoenfeld_events(double hr_alt, double alpha_one_sided,
                             double power) {
  if (!(hr_alt > 0.0 && hr_alt < 1.0)) {
    throw std::domain_error("schoenfeld_events: hr_alt must lie in (0,1)");
  }
  if (!(alpha_one_sided > 0.0 && alpha_one_sided < 1.0) ||
      !(power > 0.0 && power < 1.0)) {
    throw std::domain_error("schoenfeld_events: alpha and power must lie in (0,1)");
  }
  const double z = normal_quantile(1.0 - alpha_one_sided) + normal_quantile(power);
  const double lh = std::log(hr_alt);
  return static_cast<int>(std::ceil(4.0 * z * z / (lh * lh)));
}

}  // namespace sddo
