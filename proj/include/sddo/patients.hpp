#pragma once

#include <array>
#include <cmath>

#include "sddo/design.hpp"
#include "sddo/normal.hpp"
#include "sddo/rng.hpp"

namespace sddo {

/// One simulated participant. Times are months; pfs_time/os_time run from
/// enrollment, enroll_time and response_readout_time are calendar.
struct PatientRecord {
  int arm = 0;  // 0 = control, 1..I = dose arms
  double enroll_time = 0.0;
  bool responder = false;
  double response_readout_time = 0.0;
  double pfs_time = 0.0;
  double os_time = 0.0;
};

/// Per-scenario constants hoisted out of the patient loop.
struct ScenarioSampler {
  const ScenarioSpec* scen = nullptr;
  std::array<double, 9> chol{};       // lower Cholesky of latent_corr
  std::vector<double> resp_cut;       // Phi^{-1}(orr) per arm
  std::vector<double> lambda_pfs;     // per-arm exponential rates
  std::vector<double> lambda_os;

  explicit ScenarioSampler(const ScenarioSpec& s) : scen(&s) {
    if (!detail::latent_cholesky(s.latent_corr, chol)) {
      throw std::domain_error("latent_corr not positive definite");
    }
    const double base_pfs = std::log(2.0) / s.control_median_pfs_months;
    const double base_os = std::log(2.0) / s.control_median_os_months;
    const std::size_t n_arms = s.orr.size();
    resp_cut.resize(n_arms);
    lambda_pfs.resize(n_arms);
    lambda_os.resize(n_arms);
    for (std::size_t a = 0; a < n_arms; ++a) {
      // responders sit in the upper latent tail so that a positive latent
      // correlation with the survival latents means responders live longer
      resp_cut[a] = normal_quantile(1.0 - s.orr[a]);
      lambda_pfs[a] = base_pfs * s.hr_pfs[a];
      lambda_os[a] = base_os * s.hr_os[a];
    }
  }
};

/// Draws one patient through the Gaussian copula: three correlated standard
/// normal latents drive responder status and the exponential PFS/OS times
/// via the inverse CDF, so each marginal matches the scenario exactly.
inline PatientRecord generate_patient(int arm, double enroll_time,
                                      const ScenarioSampler& gen,
                                      RandomStream rs) {
  const double e0 = rs.next_normal();
  const double e1 = rs.next_normal();
  const double e2 = rs.next_normal();
  const auto& l = gen.chol;
  const double z_resp = l[0] * e0;
  const double z_pfs = l[3] * e0 + l[4] * e1;
  const double z_os = l[6] * e0 + l[7] * e1 + l[8] * e2;

  PatientRecord p;
  p.arm = arm;
  p.enroll_time = enroll_time;
  p.responder = z_resp > gen.resp_cut[arm];
  p.response_readout_time = enroll_time + gen.scen->response_readout_lag_months;
  // inverse exponential CDF on the Gaussian tail probability; using the
  // upper tail keeps -log well away from 0 for typical draws
  p.pfs_time = -std::log(normal_cdf(-z_pfs)) / gen.lambda_pfs[arm];
  p.os_time = -std::log(normal_cdf(-z_os)) / gen.lambda_os[arm];
  if (gen.scen->clamp_os_to_pfs && p.os_time < p.pfs_time) {
    p.os_time = p.pfs_time;
  }
  return p;
}

}  // namespace sddo
