#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sddo/errors.hpp"

namespace sddo {

/// One-dimensional adaptive integration request. Bounds may be +-infinity;
/// infinite intervals are folded onto a finite one with a tangent map.
struct Quadrature {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  double abs_tolerance = 1e-8;
  int max_subdivisions = 200;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1].
inline constexpr double kGK15Node[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kGK15WK[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGK15WG[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct PanelResult {
  double integral = 0.0;
  double error = 0.0;
};

template <typename F>
PanelResult gk15(const F& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);

  const double fc = f(mid);
  double result_gauss = fc * kGK15WG[3];
  double result_kronrod = fc * kGK15WK[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kGK15Node[j];
    const double fsum = f(mid - dx) + f(mid + dx);
    result_kronrod += kGK15WK[j] * fsum;
    if (j % 2 == 1) {  // nodes 1,3,5 are the embedded Gauss points
      result_gauss += kGK15WG[j / 2] * fsum;
    }
  }
  PanelResult r;
  r.integral = result_kronrod * half;
  r.error = std::fabs((result_kronrod - result_gauss) * half);
  return r;
}

struct Segment {
  double a, b;
  double integral;
  double error;
};

template <typename F>
double adaptive_gk(const F& f, double a, double b, double tol, int max_subdiv) {
  std::vector<Segment> segs;
  PanelResult first = gk15(f, a, b);
  segs.push_back({a, b, first.integral, first.error});

  for (int iter = 0; iter < max_subdiv; ++iter) {
    double total_err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
      total_err += segs[i].error;
      if (segs[i].error > segs[worst].error) worst = i;
    }
    if (total_err <= tol) {
      double total = 0.0;
      for (const auto& s : segs) total += s.integral;
      return total;
    }
    Segment s = segs[worst];
    const double m = 0.5 * (s.a + s.b);
    if (!(m > s.a && m < s.b)) {
      throw numerical_error("integrate: interval too small to subdivide");
    }
    PanelResult left = gk15(f, s.a, m);
    PanelResult right = gk15(f, m, s.b);
    segs[worst] = {s.a, m, left.integral, left.error};
    segs.push_back({m, s.b, right.integral, right.error});
  }
  throw numerical_error("integrate: tolerance not reached within max_subdivisions");
}

}  // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [q.lower, q.upper].
/// Throws numerical_error when the tolerance cannot be met and
/// std::domain_error for an empty/invalid interval.
template <typename F>
double integrate(const F& f, const Quadrature& q) {
  const double inf = std::numeric_limits<double>::infinity();
  if (std::isnan(q.lower) || std::isnan(q.upper) || !(q.lower < q.upper)) {
    throw std::domain_error("integrate: lower bound must be below upper bound");
  }
  const double pi_half = 1.5707963267948966192;
  if (q.lower == -inf && q.upper == inf) {
    auto g = [&f](double u) {
      const double t = std::tan(u);
      const double c = std::cos(u);
      return f(t) / (c * c);
    };
    return detail::adaptive_gk(g, -pi_half, pi_half, q.abs_tolerance,
                               q.max_subdivisions);
  }
  if (q.upper == inf) {
    const double a = q.lower;
    auto g = [&f, a](double u) {
      const double t = std::tan(u);
      const double c = std::cos(u);
      return f(a + t) / (c * c);
    };
    return detail::adaptive_gk(g, 0.0, pi_half, q.abs_tolerance,
                               q.max_subdivisions);
  }
  if (q.lower == -inf) {
    const double b = q.upper;
    auto g = [&f, b](double u) {
      const double t = std::tan(u);
      const double c = std::cos(u);
      return f(b - t) / (c * c);
    };
    return detail::adaptive_gk(g, 0.0, pi_half, q.abs_tolerance,
                               q.max_subdivisions);
  }
  return detail::adaptive_gk(f, q.lower, q.upper, q.abs_tolerance,
                             q.max_subdivisions);
}

}  // namespace sddo
