#pragma once

#include <cmath>
#include <stdexcept>

#include "sddo/normal.hpp"
#include "sddo/quadrature.hpp"

namespace sddo {

/// Upper bound on the Phase III false-positive rate when the final statistic
/// combines the best of I interim arms with the post-interim increment:
///   integral of [1 - (1 - Phi((z_alpha - sqrt(1-t) z)/sqrt(t)))^I] phi(z) dz.
/// At I = 1 this collapses to alpha for every t.
inline double alpha3_upper_bound(int I, double t, double alpha = 0.025,
                                 double abs_tol = 1e-10) {
  if (I < 1) throw std::domain_error("alpha3_upper_bound: I must be >= 1");
  if (!(t > 0.0 && t <= 1.0)) {
    throw std::domain_error("alpha3_upper_bound: t must lie in (0,1]");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("alpha3_upper_bound: alpha must lie in (0,1)");
  }
  const double z_alpha = normal_quantile(alpha);
  if (t == 1.0) {
    return 1.0 - std::pow(1.0 - normal_cdf(z_alpha), I);
  }
  const double rt = std::sqrt(t);
  const double r1t = std::sqrt(1.0 - t);
  auto f = [&](double z) {
    const double inner = normal_cdf((z_alpha - r1t * z) / rt);
    return (1.0 - std::pow(1.0 - inner, I)) * normal_pdf(z);
  };
  Quadrature q;
  q.abs_tolerance = abs_tol;
  q.max_subdivisions = 400;
  return integrate(f, q);
}

/// Probability mass entering the Phase II path under the global null: the
/// futility-pass probability minus the fixed Phase III share alpha. The
/// futility gate passes when the best of I arm means beats the control mean
/// by more than tau0 + Phi^{-1}(s0) sqrt(2) sigma, with every mean drawn
/// from N(p0, sigma^2), sigma^2 = p0(1-p0)/n0.
inline double a2_probability(int I, int n0, double p0, double tau0, double s0,
                             double alpha = 0.025, double abs_tol = 1e-10) {
  if (I < 1) throw std::domain_error("a2_probability: I must be >= 1");
  if (n0 < 1) throw std::domain_error("a2_probability: n0 must be >= 1");
  if (!(p0 > 0.0 && p0 < 1.0)) {
    throw std::domain_error("a2_probability: p0 must lie in (0,1)");
  }
  if (!(s0 > 0.0 && s0 < 1.0)) {
    throw std::domain_error("a2_probability: s0 must lie in (0,1)");
  }
  const double sigma = std::sqrt(p0 * (1.0 - p0) / n0);
  const double shift = (tau0 + normal_quantile(s0) * std::sqrt(2.0) * sigma) / sigma;
  // standardized control mean u = (mu - p0)/sigma
  auto f = [&](double u) {
    return std::pow(normal_cdf(u + shift), I) * normal_pdf(u);
  };
  Quadrature q;
  q.abs_tolerance = abs_tol;
  q.max_subdivisions = 400;
  return (1.0 - alpha) - integrate(f, q);
}

/// Appendix-style overall Type I error bound a2*alpha + alpha*alpha3.
inline double overall_type1_bound(int I, double t, int n0, double p0,
                                  double tau0, double s0,
                                  double alpha = 0.025) {
  return a2_probability(I, n0, p0, tau0, s0, alpha) * alpha +
         alpha * alpha3_upper_bound(I, t, alpha);
}

}  // namespace sddo
