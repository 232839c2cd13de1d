#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sddo/design.hpp"
#include "sddo/normal.hpp"

namespace sddo {

/// Interim snapshot of one treatment arm: response counts among patients
/// with mature ORR, plus the OS events pooled over this arm and control.
struct ArmInterimData {
  int n = 0;        // patients with mature ORR
  int y = 0;        // responders among them
  int m1 = 0;       // OS events, this arm + control pooled
  double log_hr_hat = 0.0;  // only meaningful when m1 > 0
};

/// Beta posterior for a response rate, with its exact moments.
struct OrrPosterior {
  double a_post = 0.0;
  double b_post = 0.0;
  double mean = 0.0;
  double variance = 0.0;
};

inline OrrPosterior orr_posterior(double a, double b, int n, int y) {
  if (!(a > 0.0 && b > 0.0)) {
    throw std::domain_error("orr_posterior: prior parameters must be positive");
  }
  if (y < 0 || n < 0 || y > n) {
    throw std::domain_error("orr_posterior: need 0 <= y <= n");
  }
  OrrPosterior p;
  p.a_post = a + y;
  p.b_post = b + n - y;
  const double s = p.a_post + p.b_post;
  p.mean = p.a_post / s;
  p.variance = p.a_post * p.b_post / ((s + 1.0) * s * s);
  return p;
}

/// Normal posterior for a log hazard ratio. The prior contributes sigma_d
/// pseudo-events at mean mu_d; with m1 = 0 the prior is returned unchanged.
struct HrPosterior {
  double mean = 0.0;
  double variance = 0.0;
};

inline HrPosterior hr_posterior(double log_hr_hat, int m1, double mu_d,
                                double sigma_d) {
  if (!(sigma_d > 0.0)) {
    throw std::domain_error("hr_posterior: sigma_d must be positive");
  }
  if (m1 < 0) throw std::domain_error("hr_posterior: m1 must be non-negative");
  HrPosterior p;
  const double m = static_cast<double>(m1);
  p.mean = (m1 == 0) ? mu_d : (log_hr_hat * m + sigma_d * mu_d) / (m + sigma_d);
  p.variance = 4.0 / (m + sigma_d);
  return p;
}

/// Bivariate normal posterior over (response rate, log HR_OS) for one dose.
struct JointPosterior {
  double mu_p = 0.0;
  double mu_theta = 0.0;
  double sd_p = 0.0;
  double sd_theta = 0.0;
  double rho1 = 0.0;
};

inline JointPosterior joint_posterior(const OrrPosterior& orr,
                                      const HrPosterior& hr, double rho1) {
  if (!(rho1 > -1.0 && rho1 < 1.0)) {
    throw std::domain_error("joint_posterior: |rho1| must be below 1");
  }
  JointPosterior jp;
  jp.mu_p = orr.mean;
  jp.mu_theta = hr.mean;
  jp.sd_p = std::sqrt(orr.variance);
  jp.sd_theta = std::sqrt(hr.variance);
  jp.rho1 = rho1;
  return jp;
}

/// Selection score for one dose. The anchored rule is the conditional-mean
/// score mu_p + rho1 (sd_p/sd_theta) mu_theta, which rewards doses whose OS
/// posterior sits below the null; the literal rule scores by mu_p alone.
inline double dose_score(const JointPosterior& jp,
                         DoseScoreRule rule = DoseScoreRule::kAnchored) {
  if (rule == DoseScoreRule::kLiteral) return jp.mu_p;
  return jp.mu_p + jp.rho1 * (jp.sd_p / jp.sd_theta) * jp.mu_theta;
}

/// Argmax of dose_score; ties go to the lowest dose index (0-based).
inline int select_optimal_dose(const std::vector<JointPosterior>& posteriors,
                               DoseScoreRule rule = DoseScoreRule::kAnchored) {
  if (posteriors.empty()) {
    throw std::domain_error("select_optimal_dose: empty posterior list");
  }
  int best = 0;
  double best_score = dose_score(posteriors[0], rule);
  for (std::size_t i = 1; i < posteriors.size(); ++i) {
    const double s = dose_score(posteriors[i], rule);
    if (s > best_score) {
      best = static_cast<int>(i);
      best_score = s;
    }
  }
  return best;
}

enum class Action { kTerminate, kContinuePhaseII, kExpandPhaseIII };

inline const char* to_string(Action a) {
  switch (a) {
    case Action::kTerminate: return "terminate";
    case Action::kContinuePhaseII: return "phase2";
    case Action::kExpandPhaseIII: return "phase3";
  }
  return "?";
}

struct InterimDecision {
  int selected_arm = 0;  // 0-based dose index
  Action action = Action::kTerminate;
  double futility_prob = 0.0;      // q(tau0)
  double significance_prob = 0.0;  // q(tau1)
  std::optional<int> adjusted_m2;  // set by the SSR step on expansion
  std::optional<double> ppos_at_adjusted;
};

/// Normal location/scale of the treatment-minus-control contrast behind the
/// interim gates: the selected dose's response rate conditioned on theta at
/// its posterior mean (variance sd_p^2 (1-rho1^2)) minus the independent
/// control posterior.
struct GateStats {
  double delta = 0.0;
  double sd = 0.0;
};

inline GateStats gate_stats(const JointPosterior& selected,
                            const OrrPosterior& control,
                            const DesignSpec& spec) {
  const double cond_mean = dose_score(selected, spec.dose_score_rule);
  const double cond_var =
      selected.sd_p * selected.sd_p * (1.0 - selected.rho1 * selected.rho1);
  return {cond_mean - control.mean, std::sqrt(cond_var + control.variance)};
}

/// Futility/significance gate for the selected dose. q(tau) is the
/// probability that the selected dose beats control by at least tau.
/// Terminate when q(tau0) <= s0; otherwise expand when q(tau1) >= s1;
/// otherwise run the Phase II path.
inline InterimDecision decide(const JointPosterior& selected,
                              const OrrPosterior& control,
                              const DesignSpec& spec) {
  const GateStats g = gate_stats(selected, control, spec);
  auto q = [&](double tau) { return normal_cdf((g.delta - tau) / g.sd); };

  InterimDecision d;
  d.futility_prob = q(spec.tau0);
  d.significance_prob = q(spec.tau1);
  if (d.futility_prob <= spec.s0) {
    d.action = Action::kTerminate;
  } else if (d.significance_prob >= spec.s1) {
    d.action = Action::kExpandPhaseIII;
  } else {
    d.action = Action::kContinuePhaseII;
  }
  return d;
}

}  // namespace sddo
