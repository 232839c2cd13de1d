#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "sddo/errors.hpp"

namespace sddo {

/// One subject's follow-up: observed time and whether the event occurred
/// (false = censored at that time).
struct SurvObs {
  double time = 0.0;
  bool event = false;
};

/// Standard (unweighted) two-group log-rank statistic (O-E)/sqrt(V) for
/// group A with the hypergeometric variance. Tied event times share one
/// risk-set update. Negative values favor group A having fewer events than
/// expected (treatment benefit when A is the treated arm).
inline double logrank_z(std::span<const SurvObs> group_a,
                        std::span<const SurvObs> group_b) {
  struct Row {
    double time;
    bool event;
    bool in_a;
  };
  std::vector<Row> rows;
  rows.reserve(group_a.size() + group_b.size());
  for (const auto& s : group_a) rows.push_back({s.time, s.event, true});
  for (const auto& s : group_b) rows.push_back({s.time, s.event, false});
  bool any_event = false;
  for (const auto& r : rows) any_event |= r.event;
  if (!any_event) {
    throw std::domain_error("logrank_z: no events in either group");
  }
  std::sort(rows.begin(), rows.end(),
            [](const Row& x, const Row& y) { return x.time < y.time; });

  double n_a = static_cast<double>(group_a.size());
  double n_b = static_cast<double>(group_b.size());
  double observed_a = 0.0, expected_a = 0.0, variance = 0.0;

  std::size_t i = 0;
  while (i < rows.size()) {
    const double t = rows[i].time;
    double d_a = 0.0, d_b = 0.0, c_a = 0.0, c_b = 0.0;
    // consume every subject tied at time t with one risk set
    while (i < rows.size() && rows[i].time == t) {
      if (rows[i].event) {
        (rows[i].in_a ? d_a : d_b) += 1.0;
      } else {
        (rows[i].in_a ? c_a : c_b) += 1.0;
      }
      ++i;
    }
    const double d = d_a + d_b;
    const double n = n_a + n_b;
    if (d > 0.0 && n_a > 0.0 && n_b > 0.0) {
      observed_a += d_a;
      expected_a += d * n_a / n;
      if (n > 1.0) {
        variance += d * (n_a / n) * (n_b / n) * (n - d) / (n - 1.0);
      }
    }
    n_a -= d_a + c_a;
    n_b -= d_b + c_b;
  }
  if (!(variance > 0.0)) {
    throw numerical_error("logrank_z: zero variance, statistic undefined");
  }
  return (observed_a - expected_a) / std::sqrt(variance);
}

}  // namespace sddo
