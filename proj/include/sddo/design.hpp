#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "sddo/priors.hpp"

namespace sddo {

enum class DoseScoreRule { kAnchored, kLiteral };
enum class SsrTRule { kVarying, kFixedAtPlanned };

inline const char* to_string(DoseScoreRule r) {
  return r == DoseScoreRule::kAnchored ? "anchored" : "literal";
}
inline const char* to_string(SsrTRule r) {
  return r == SsrTRule::kVarying ? "varying" : "fixed_at_planned";
}

/// Static description of one trial design: doses, priors, decision
/// thresholds, event-size plan and interim trigger rules.
struct DesignSpec {
  std::vector<double> dose_levels;  // d_1 < ... < d_I
  PriorFunctions priors;
  double rho1 = -0.5;          // assumed ORR <-> log HR_OS posterior corr.
  double s0 = 0.9;             // futility confidence level
  double s1 = 0.9;             // significance confidence level
  double tau0 = std::nan("");  // futility margin, NaN = not yet calibrated
  double tau1 = std::nan("");  // significance margin
  int phase2_events = 140;     // pooled PFS events closing the Phase II path
  int m2_planned = 226;        // planned post-interim OS events
  int m2_max = 507;            // re-estimation ceiling
  double alpha_one_sided = 0.025;
  double power_target = 0.90;
  int interim_orr_n_per_arm = 60;
  int interim_min_control_os_events = 30;
  std::string argmax_tie_break = "lowest_dose";

  // Control-arm response prior (same Beta family as the treatment arms).
  double control_prior_a = 2.0;
  double control_prior_b = 2.0;

  DoseScoreRule dose_score_rule = DoseScoreRule::kAnchored;
  SsrTRule ssr_t_rule = SsrTRule::kVarying;
  // PPoS level at which an expansion is flagged as supporting accelerated
  // approval; NaN means "use power_target".
  double aa_ppos_threshold = std::nan("");

  int n_doses() const { return static_cast<int>(dose_levels.size()); }
  bool has_tau() const { return !std::isnan(tau0) && !std::isnan(tau1); }
  double aa_threshold() const {
    return std::isnan(aa_ppos_threshold) ? power_target : aa_ppos_threshold;
  }

  // field-by-field equality where an unset (NaN) optional matches unset
  friend bool operator==(const DesignSpec& x, const DesignSpec& y) {
    auto same = [](double a, double b) {
      return (std::isnan(a) && std::isnan(b)) || a == b;
    };
    return x.dose_levels == y.dose_levels && x.priors == y.priors &&
           x.rho1 == y.rho1 && x.s0 == y.s0 && x.s1 == y.s1 &&
           same(x.tau0, y.tau0) && same(x.tau1, y.tau1) &&
           x.phase2_events == y.phase2_events &&
           x.m2_planned == y.m2_planned && x.m2_max == y.m2_max &&
           x.alpha_one_sided == y.alpha_one_sided &&
           x.power_target == y.power_target &&
           x.interim_orr_n_per_arm == y.interim_orr_n_per_arm &&
           x.interim_min_control_os_events == y.interim_min_control_os_events &&
           x.argmax_tie_break == y.argmax_tie_break &&
           x.control_prior_a == y.control_prior_a &&
           x.control_prior_b == y.control_prior_b &&
           x.dose_score_rule == y.dose_score_rule &&
           x.ssr_t_rule == y.ssr_t_rule &&
           same(x.aa_ppos_threshold, y.aa_ppos_threshold);
  }
};

/// Ground truth for one simulated world. All per-arm vectors are indexed
/// control-first: orr[0], hr_pfs[0]=1, hr_os[0]=1 describe the control arm.
struct ScenarioSpec {
  std::string name = "scenario";
  std::vector<double> orr;     // length I+1
  std::vector<double> hr_pfs;  // length I+1, leading 1
  std::vector<double> hr_os;   // length I+1, leading 1
  double control_median_os_months = 12.0;
  double control_median_pfs_months = 6.0;
  double accrual_rate_per_month = 20.0;  // total across all open arms
  double response_readout_lag_months = 4.2;
  // Row-major 3x3 latent correlation over (response, PFS, OS).
  std::array<double, 9> latent_corr = {1.0, 0.5, 0.5,
                                       0.5, 1.0, 0.7,
                                       0.5, 0.7, 1.0};
  int max_enrollment_per_arm = 400;
  bool clamp_os_to_pfs = false;
  // 1-based dose indices counted as "true optimal" for the conditional
  // positive rate; empty = derive (lowest HR_OS, ties by highest ORR).
  std::vector<int> true_optimal;

  bool operator==(const ScenarioSpec&) const = default;
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Cholesky factor of the 3x3 latent correlation; false if not positive
// definite.
inline bool latent_cholesky(const std::array<double, 9>& c,
                            std::array<double, 9>& l) {
  l.fill(0.0);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = c[i * 3 + j];
      for (int k = 0; k < j; ++k) sum -= l[i * 3 + k] * l[j * 3 + k];
      if (i == j) {
        if (sum <= 0.0) return false;
        l[i * 3 + i] = std::sqrt(sum);
      } else {
        l[i * 3 + j] = sum / l[j * 3 + j];
      }
    }
  }
  return true;
}

}  // namespace detail

/// Every violated invariant, as "field: problem". Empty result = valid pair.
inline std::vector<std::string> validate(const DesignSpec& d,
                                         const ScenarioSpec& s,
                                         bool require_tau = true) {
  std::vector<std::string> errs;
  auto err = [&errs](const std::string& field, const std::string& msg) {
    errs.push_back(field + ": " + msg);
  };

  const int I = d.n_doses();
  if (I < 1) err("design.dose_levels", "at least one dose level required");
  for (int i = 0; i + 1 < I; ++i) {
    if (!(d.dose_levels[i] < d.dose_levels[i + 1])) {
      err("design.dose_levels", "dose_levels not strictly increasing");
      break;
    }
  }
  for (double dose : d.dose_levels) {
    const PriorAt p = prior_at(d.priors, dose);
    if (!(p.a > 0.0) || !(p.b > 0.0)) {
      err("design.priors", "a_fn and b_fn must be positive at dose " +
                               detail::fmt_double(dose));
    }
    if (!(p.sigma > 0.0)) {
      err("design.priors", "sigma_fn must be positive at dose " +
                               detail::fmt_double(dose));
    }
  }
  if (!(d.rho1 > -1.0 && d.rho1 < 1.0)) err("design.rho1", "rho1 outside (-1,1)");
  if (!(d.s0 > 0.0 && d.s0 < 1.0)) err("design.s0", "s0 outside (0,1)");
  if (!(d.s1 > 0.0 && d.s1 < 1.0)) err("design.s1", "s1 outside (0,1)");
  if (require_tau) {
    if (std::isnan(d.tau0) || std::isnan(d.tau1)) {
      err("design.tau0", "tau0/tau1 must be set (run calibration first)");
    } else {
      if (!(d.tau0 >= -1.0 && d.tau0 <= 1.0)) err("design.tau0", "tau0 outside [-1,1]");
      if (!(d.tau1 >= -1.0 && d.tau1 <= 1.0)) err("design.tau1", "tau1 outside [-1,1]");
      if (!(d.tau0 <= d.tau1)) err("design.tau0", "tau0 must not exceed tau1");
    }
  }
  if (d.phase2_events < 1) err("design.phase2_events", "must be positive");
  if (d.m2_planned < 1) err("design.m2_planned", "must be positive");
  if (!(d.m2_planned <= d.m2_max)) err("design.m2_planned", "m2_planned exceeds m2_max");
  if (!(d.alpha_one_sided > 0.0 && d.alpha_one_sided < 1.0)) {
    err("design.alpha_one_sided", "outside (0,1)");
  }
  if (!(d.power_target > 0.0 && d.power_target < 1.0)) {
    err("design.power_target", "outside (0,1)");
  }
  if (d.interim_orr_n_per_arm < 1) err("design.interim_orr_n_per_arm", "must be positive");
  if (d.interim_min_control_os_events < 1) {
    err("design.interim_min_control_os_events", "must be positive");
  }
  if (d.argmax_tie_break != "lowest_dose") {
    err("design.argmax_tie_break", "only 'lowest_dose' is supported");
  }
  if (!(d.control_prior_a > 0.0 && d.control_prior_b > 0.0)) {
    err("design.control_prior_a", "control prior parameters must be positive");
  }

  const std::size_t want = static_cast<std::size_t>(I) + 1;
  if (s.orr.size() != want) err("scenario.orr", "needs control + one entry per dose");
  if (s.hr_pfs.size() != want) err("scenario.hr_pfs", "needs control + one entry per dose");
  if (s.hr_os.size() != want) err("scenario.hr_os", "needs control + one entry per dose");
  for (double p : s.orr) {
    if (!(p > 0.0 && p < 1.0)) { err("scenario.orr", "all ORR must lie in (0,1)"); break; }
  }
  for (double h : s.hr_pfs) {
    if (!(h > 0.0)) { err("scenario.hr_pfs", "all hazard ratios must be positive"); break; }
  }
  for (double h : s.hr_os) {
    if (!(h > 0.0)) { err("scenario.hr_os", "all hazard ratios must be positive"); break; }
  }
  if (!(s.control_median_os_months > 0.0)) err("scenario.control_median_os_months", "must be positive");
  if (!(s.control_median_pfs_months > 0.0)) err("scenario.control_median_pfs_months", "must be positive");
  if (!(s.accrual_rate_per_month > 0.0)) err("scenario.accrual_rate_per_month", "must be positive");
  if (!(s.response_readout_lag_months > 0.0)) err("scenario.response_readout_lag_months", "must be positive");
  if (s.max_enrollment_per_arm < 1) err("scenario.max_enrollment_per_arm", "must be positive");

  for (int i = 0; i < 3; ++i) {
    if (s.latent_corr[i * 3 + i] != 1.0) {
      err("scenario.latent_corr", "diagonal must be 1");
      break;
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < i; ++j) {
      if (s.latent_corr[i * 3 + j] != s.latent_corr[j * 3 + i]) {
        err("scenario.latent_corr", "matrix must be symmetric");
      }
    }
  }
  std::array<double, 9> l;
  if (!detail::latent_cholesky(s.latent_corr, l)) {
    err("scenario.latent_corr", "matrix not positive definite");
  }
  for (int idx : s.true_optimal) {
    if (idx < 1 || idx > I) {
      err("scenario.true_optimal", "dose indices must lie in 1..I");
      break;
    }
  }
  return errs;
}

/// The configured true-optimal dose set (1-based), deriving the default
/// (lowest HR_OS, ties broken by highest ORR) when not set explicitly.
inline std::vector<int> true_optimal_doses(const DesignSpec& d,
                                           const ScenarioSpec& s) {
  if (!s.true_optimal.empty()) return s.true_optimal;
  std::vector<int> best;
  double best_hr = std::numeric_limits<double>::infinity();
  double best_orr = -1.0;
  for (int i = 1; i <= d.n_doses(); ++i) {
    const double hr = s.hr_os[i];
    const double orr = s.orr[i];
    if (hr < best_hr || (hr == best_hr && orr > best_orr)) {
      best_hr = hr;
      best_orr = orr;
    }
  }
  for (int i = 1; i <= d.n_doses(); ++i) {
    if (s.hr_os[i] == best_hr && s.orr[i] == best_orr) best.push_back(i);
  }
  return best;
}

}  // namespace sddo
