#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sddo {

enum class CurveFamily { kConstant, kLinear, kQuadratic, kSigmoid };

inline const char* to_string(CurveFamily f) {
  switch (f) {
    case CurveFamily::kConstant: return "constant";
    case CurveFamily::kLinear: return "linear";
    case CurveFamily::kQuadratic: return "quadratic";
    case CurveFamily::kSigmoid: return "sigmoid";
  }
  return "?";
}

inline CurveFamily curve_family_from_string(const std::string& s) {
  if (s == "constant") return CurveFamily::kConstant;
  if (s == "linear") return CurveFamily::kLinear;
  if (s == "quadratic") return CurveFamily::kQuadratic;
  if (s == "sigmoid") return CurveFamily::kSigmoid;
  throw std::domain_error("unknown curve family '" + s + "'");
}

/// A scalar function of dose level, one of four parametric families:
///   constant:  c0
///   linear:    c0 + c1*d
///   quadratic: c0 + c1*d + c2*d^2
///   sigmoid:   c0 + c1 / (1 + exp(-c2*(d - c3)))
struct DoseCurve {
  CurveFamily family = CurveFamily::kConstant;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, c3 = 0.0;

  double operator()(double d) const {
    switch (family) {
      case CurveFamily::kConstant: return c0;
      case CurveFamily::kLinear: return c0 + c1 * d;
      case CurveFamily::kQuadratic: return c0 + d * (c1 + d * c2);
      case CurveFamily::kSigmoid:
        return c0 + c1 / (1.0 + std::exp(-c2 * (d - c3)));
    }
    return c0;
  }

  static DoseCurve constant(double v) { return {CurveFamily::kConstant, v}; }

  bool operator==(const DoseCurve&) const = default;
};

/// Dose-indexed prior hyperparameters. The response-rate prior at dose d is
/// Beta(a_fn(d), b_fn(d)); the log hazard-ratio prior is
/// Normal(mu_fn(d), 4 / sigma_fn(d)), so sigma_fn acts as a precision in
/// event-count units.
struct PriorFunctions {
  DoseCurve a_fn = DoseCurve::constant(2.0);
  DoseCurve b_fn = DoseCurve::constant(2.0);
  DoseCurve mu_fn = DoseCurve::constant(0.0);
  DoseCurve sigma_fn = DoseCurve::constant(8.0);

  bool operator==(const PriorFunctions&) const = default;
};

struct PriorAt {
  double a = 0.0;
  double b = 0.0;
  double mu = 0.0;
  double sigma = 0.0;
};

inline PriorAt prior_at(const PriorFunctions& p, double dose) {
  return {p.a_fn(dose), p.b_fn(dose), p.mu_fn(dose), p.sigma_fn(dose)};
}

}  // namespace sddo
