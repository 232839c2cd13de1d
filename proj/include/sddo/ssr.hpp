#pragma once

#include <cmath>
#include <stdexcept>

#include "sddo/design.hpp"
#include "sddo/normal.hpp"

namespace sddo {

/// Everything the event re-estimation needs that is frozen at the interim
/// analysis: interim OS events and log-HR estimate for the selected dose,
/// its prior parameters, the significance cutoff and the interim statistic.
struct PposInputs {
  int m1 = 0;              // OS events at interim, selected arm + control
  double log_hr_hat = 0.0;
  double mu_d = 0.0;
  double sigma_d = 8.0;
  double z_alpha = 0.0;    // Phi^{-1}(alpha), negative
  double z_t = 0.0;        // interim standardized statistic Z(t)

  void check() const {
    if (m1 <= 0) throw std::domain_error("PposInputs: m1 must be positive");
    if (!(sigma_d > 0.0)) throw std::domain_error("PposInputs: sigma_d must be positive");
    if (!(z_alpha < 0.0)) throw std::domain_error("PposInputs: z_alpha must be negative");
  }
};

/// Interim standardized statistic: log-HR over its large-sample standard
/// error 2/sqrt(m1).
inline double interim_z(double log_hr_hat, int m1) {
  if (m1 <= 0) throw std::domain_error("interim_z: m1 must be positive");
  return log_hr_hat * std::sqrt(static_cast<double>(m1)) / 2.0;
}

/// Closed-form predictive probability that the final test clears z_alpha
/// when m2_tilde further OS events are collected. The information fraction
/// t = m1/(m1+m2_tilde) moves with m2_tilde; pass fixed_t to freeze it
/// instead (sensitivity analysis).
inline double ppos(const PposInputs& in, long long m2_tilde,
                   double fixed_t = std::nan("")) {
  in.check();
  if (m2_tilde < 1) throw std::domain_error("ppos: m2_tilde must be >= 1");
  const double m1 = static_cast<double>(in.m1);
  const double m2 = static_cast<double>(m2_tilde);
  const double t = std::isnan(fixed_t) ? m1 / (m1 + m2) : fixed_t;
  const double m_post =
      (in.log_hr_hat * m1 + in.sigma_d * in.mu_d) / (m1 + in.sigma_d);
  const double threshold =
      2.0 * (in.z_alpha - std::sqrt(t) * in.z_t) / std::sqrt((1.0 - t) * m2);
  const double sd = std::sqrt(4.0 / m2 + 4.0 / (m1 + in.sigma_d));
  return normal_cdf((threshold - m_post) / sd);
}

struct ReestimateResult {
  int m2 = 0;
  double ppos_at_m2 = 0.0;
  bool target_met = false;
};

/// Event-size re-estimation: keep the planned size when it already reaches
/// the power target, otherwise take the smallest event count in
/// [m2_planned, m2_max] whose PPoS crosses the target (first crossing of a
/// unit-step scan; PPoS is not monotone in m2). Falls back to m2_max.
inline ReestimateResult reestimate_events(const PposInputs& in, int m2_planned,
                                          int m2_max, double power_target,
                                          SsrTRule t_rule = SsrTRule::kVarying) {
  if (m2_planned < 1 || m2_planned > m2_max) {
    throw std::domain_error("reestimate_events: need 1 <= m2_planned <= m2_max");
  }
  const double fixed_t =
      (t_rule == SsrTRule::kFixedAtPlanned)
          ? static_cast<double>(in.m1) / (in.m1 + static_cast<double>(m2_planned))
          : std::nan("");
  for (int m2 = m2_planned; m2 <= m2_max; ++m2) {
    const double p = ppos(in, m2, fixed_t);
    if (p >= power_target) return {m2, p, true};
  }
  return {m2_max, ppos(in, m2_max, fixed_t), false};
}

}  // namespace sddo
