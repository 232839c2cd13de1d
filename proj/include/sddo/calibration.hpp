#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "sddo/design.hpp"
#include "sddo/normal.hpp"
#include "sddo/trial.hpp"

namespace sddo {

/// Targets for the tau grid search: cap the false-negative rate (early
/// termination despite one dose with a real ORR advantage) and the
/// false-positive rate (Phase III expansion under the global null).
struct CalibrationTarget {
  double false_negative_cap = 0.05;
  double false_positive_cap = 0.025;
  double orr_shift_for_fn = 0.15;
  double grid_lo = -1.0;
  double grid_hi = 1.0;
  double grid_step = 0.01;
  int n_sims_per_point = 10000;
};

struct CalibrationResult {
  double tau = 0.0;
  double achieved_probability = 0.0;  // estimated error rate at tau
  double mc_se = 0.0;
  bool boundary = false;  // no grid point met the cap
  int n_effective = 0;    // interim simulations that triggered
};

namespace detail {

// Per-replicate critical taus: Terminate iff tau0 >= term_crit; the
// significance gate fires iff tau1 <= expand_crit. Both are linear in the
// gate stats, so one simulated interim stage serves every grid point
// (common random numbers across the grid). term/expand stay paired by
// replicate.
struct GateCrits {
  std::vector<double> term;    // delta - sd * Phi^{-1}(s0)
  std::vector<double> expand;  // delta - sd * Phi^{-1}(s1)
  int n_failed = 0;
};

inline GateCrits simulate_gate_crits(const DesignSpec& design,
                                     const ScenarioSpec& scen, int n_sims,
                                     std::uint64_t seed, int workers) {
  const TrialSimulator sim(design, scen);
  const double zs0 = normal_quantile(design.s0);
  const double zs1 = normal_quantile(design.s1);
  std::vector<double> term(n_sims), expand(n_sims);
  std::vector<char> failed(n_sims, 0);

  auto run_one = [&](int i) {
    const auto st = sim.interim_stage(seed, static_cast<std::uint32_t>(i));
    if (st.trigger_failed) {
      failed[i] = 1;
      return;
    }
    term[i] = st.gate.delta - st.gate.sd * zs0;
    expand[i] = st.gate.delta - st.gate.sd * zs1;
  };
  if (workers <= 1) {
    for (int i = 0; i < n_sims; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= n_sims) break;
          run_one(i);
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  GateCrits g;
  g.term.reserve(n_sims);
  g.expand.reserve(n_sims);
  for (int i = 0; i < n_sims; ++i) {
    if (failed[i]) {
      ++g.n_failed;
      continue;
    }
    g.term.push_back(term[i]);
    g.expand.push_back(expand[i]);
  }
  return g;
}

inline int grid_points(const CalibrationTarget& t) {
  return static_cast<int>(std::floor((t.grid_hi - t.grid_lo) / t.grid_step + 1e-9)) + 1;
}

inline double grid_value(const CalibrationTarget& t, int idx) {
  const double v = t.grid_lo + idx * t.grid_step;
  return std::min(v, t.grid_hi);
}

}  // namespace detail

/// Largest grid tau0 whose estimated termination probability, under a
/// scenario where exactly one dose improves ORR by orr_shift_for_fn, stays
/// at or below the false-negative cap. The base scenario supplies the
/// control ORR and all data-generation settings; hazard ratios are reset to
/// 1 so the shift is the only effect.
inline CalibrationResult calibrate_tau0(const DesignSpec& design,
                                        const ScenarioSpec& base,
                                        const CalibrationTarget& target,
                                        std::uint64_t seed, int workers = 1) {
  ScenarioSpec scen = base;
  const double p0 = base.orr.at(0);
  scen.orr.assign(design.n_doses() + 1, p0);
  scen.orr.back() = p0 + target.orr_shift_for_fn;
  scen.hr_pfs.assign(design.n_doses() + 1, 1.0);
  scen.hr_os.assign(design.n_doses() + 1, 1.0);

  auto g = detail::simulate_gate_crits(design, scen, target.n_sims_per_point,
                                       seed, workers);
  std::sort(g.term.begin(), g.term.end());
  const double n = static_cast<double>(g.term.size());
  CalibrationResult r;
  r.n_effective = static_cast<int>(g.term.size());
  if (g.term.empty()) {
    r.tau = target.grid_lo;
    r.boundary = true;
    return r;
  }
  // P(Terminate; tau) = #{crit <= tau} / n, nondecreasing in tau
  auto p_term = [&](double tau) {
    return (std::upper_bound(g.term.begin(), g.term.end(), tau) -
            g.term.begin()) / n;
  };
  const int points = detail::grid_points(target);
  r.tau = target.grid_lo;
  r.boundary = true;
  for (int i = points - 1; i >= 0; --i) {
    const double tau = detail::grid_value(target, i);
    if (p_term(tau) <= target.false_negative_cap) {
      r.tau = tau;
      r.boundary = false;
      break;
    }
  }
  r.achieved_probability = p_term(r.tau);
  r.mc_se = std::sqrt(std::max(r.achieved_probability *
                                   (1.0 - r.achieved_probability), 0.0) / n);
  return r;
}

/// Smallest grid tau1 whose estimated Phase III expansion probability under
/// the global null (every arm at the control ORR, all hazard ratios 1)
/// stays at or below the false-positive cap. When the design carries a
/// finite tau0 the futility gate is applied jointly; with s0 = s1 and
/// tau0 <= tau1 it is implied by the significance gate.
inline CalibrationResult calibrate_tau1(const DesignSpec& design,
                                        const ScenarioSpec& base,
                                        const CalibrationTarget& target,
                                        std::uint64_t seed, int workers = 1) {
  ScenarioSpec scen = base;
  const double p0 = base.orr.at(0);
  scen.orr.assign(design.n_doses() + 1, p0);
  scen.hr_pfs.assign(design.n_doses() + 1, 1.0);
  scen.hr_os.assign(design.n_doses() + 1, 1.0);

  const auto g = detail::simulate_gate_crits(design, scen,
                                             target.n_sims_per_point, seed,
                                             workers);
  const double n = static_cast<double>(g.expand.size());
  CalibrationResult r;
  r.n_effective = static_cast<int>(g.expand.size());
  if (g.expand.empty()) {
    r.tau = target.grid_hi;
    r.boundary = true;
    return r;
  }
  const bool use_futility_gate = !std::isnan(design.tau0);
  auto p_expand = [&](double tau1) {
    int cnt = 0;
    for (std::size_t i = 0; i < g.expand.size(); ++i) {
      const bool significant = g.expand[i] >= tau1;
      const bool not_futile = !use_futility_gate || design.tau0 < g.term[i];
      if (significant && not_futile) ++cnt;
    }
    return cnt / n;
  };
  const int points = detail::grid_points(target);
  r.tau = target.grid_hi;
  r.boundary = true;
  for (int i = 0; i < points; ++i) {
    const double tau = detail::grid_value(target, i);
    if (p_expand(tau) <= target.false_positive_cap) {
      r.tau = tau;
      r.boundary = false;
      break;
    }
  }
  r.achieved_probability = p_expand(r.tau);
  r.mc_se = std::sqrt(std::max(r.achieved_probability *
                                   (1.0 - r.achieved_probability), 0.0) / n);
  return r;
}

}  // namespace sddo
