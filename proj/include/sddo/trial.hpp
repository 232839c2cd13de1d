#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "sddo/design.hpp"
#include "sddo/interim.hpp"
#include "sddo/logrank.hpp"
#include "sddo/patients.hpp"
#include "sddo/rng.hpp"
#include "sddo/ssr.hpp"

namespace sddo {

enum class Endpoint { kNone, kPFS, kOS };

inline const char* to_string(Endpoint e) {
  switch (e) {
    case Endpoint::kNone: return "none";
    case Endpoint::kPFS: return "pfs";
    case Endpoint::kOS: return "os";
  }
  return "?";
}

/// Result of one simulated trial replicate.
struct TrialOutcome {
  bool trigger_failed = false;
  int selected_arm = -1;  // 0-based dose index; -1 when trigger failed
  InterimDecision decision;
  bool final_test_passed = false;
  Endpoint endpoint_used = Endpoint::kNone;
  int events_counted = 0;  // selected arm + control only
  double duration_months = 0.0;
  double interim_time_months = 0.0;
  bool underrun = false;
  bool degenerate_final = false;
  double final_z = std::numeric_limits<double>::quiet_NaN();
  // interim internals consumed by calibration and the test suite
  double gate_delta = 0.0;
  double gate_sd = 0.0;
  int m1_selected = 0;
  double log_hr_selected = 0.0;
  int n_enrolled_at_interim = 0;
  bool final_inputs_restricted = true;  // no dropped-arm subject analyzed
};

namespace detail {

struct ArmSnapshot {
  int n_enrolled = 0;
  int n_mature = 0;
  int y = 0;
  int deaths = 0;
  double exposure = 0.0;
  std::vector<PatientRecord> patients;
};

struct InterimState {
  bool trigger_failed = false;
  double t_interim = 0.0;
  int n_arrivals = 0;
  std::vector<ArmSnapshot> arms;  // index 0 = control
  std::vector<JointPosterior> posteriors;
  std::vector<double> log_hr;  // per dose
  OrrPosterior control_post;
  int selected_arm = 0;  // 0-based dose index
  InterimDecision decision;
  GateStats gate;
  int m1_selected = 0;
  double log_hr_selected = 0.0;
};

}  // namespace detail

/// Simulates SDDO trials for one (design, scenario) pair. All randomness is
/// addressed by (seed, replicate, substream, entity), so any replicate can
/// be run on any thread with identical results.
class TrialSimulator {
 public:
  TrialSimulator(const DesignSpec& design, const ScenarioSpec& scen)
      : design_(design),
        scen_(scen),
        sampler_(scen),
        z_alpha_(normal_quantile(design.alpha_one_sided)) {}

  /// Interim stage only: triggering, posteriors, dose selection, decision.
  detail::InterimState interim_stage(std::uint64_t seed,
                                     std::uint32_t replicate) const {
    detail::InterimState st;
    const int I = design_.n_doses();
    const int n_arms = I + 1;
    const int cap = scen_.max_enrollment_per_arm;
    const int need_mature = design_.interim_orr_n_per_arm;
    const int need_events = design_.interim_min_control_os_events;
    st.arms.resize(n_arms);

    if (need_mature > cap || need_events > cap) {
      st.trigger_failed = true;
      return st;
    }
    // both trigger conditions must be met while enrollment is still open
    const double t_mature =
        arrival(seed, replicate, static_cast<std::int64_t>(need_mature) * n_arms) +
        scen_.response_readout_lag_months;
    const double t_events = control_event_time(seed, replicate, need_events, cap);
    const double t_int = std::max(t_mature, t_events);
    const double t_last_arrival =
        arrival(seed, replicate, static_cast<std::int64_t>(cap) * n_arms);
    if (t_int > t_last_arrival) {
      st.trigger_failed = true;
      return st;
    }
    st.t_interim = t_int;

    // snapshot every patient enrolled by t_int
    std::int64_t lo = 1, hi = static_cast<std::int64_t>(cap) * n_arms;
    while (lo < hi) {  // last n with arrival(n) <= t_int
      const std::int64_t mid = (lo + hi + 1) / 2;
      if (arrival(seed, replicate, mid) <= t_int) lo = mid;
      else hi = mid - 1;
    }
    st.n_arrivals = static_cast<int>(lo);
    RandomStream pat(seed, replicate, kStreamPatient);
    for (std::int64_t n = 1; n <= st.n_arrivals; ++n) {
      const int arm = pre_interim_arm(seed, replicate, n);
      const double arr = arrival(seed, replicate, n);
      const PatientRecord p = generate_patient(
          arm, arr, sampler_, pat.at_entity(static_cast<std::uint32_t>(n)));
      auto& snap = st.arms[arm];
      ++snap.n_enrolled;
      if (p.response_readout_time <= t_int) {
        ++snap.n_mature;
        snap.y += p.responder ? 1 : 0;
      }
      if (arr + p.os_time <= t_int) {
        ++snap.deaths;
        snap.exposure += p.os_time;
      } else {
        snap.exposure += t_int - arr;
      }
      snap.patients.push_back(p);
    }

    const auto& ctrl = st.arms[0];
    st.control_post = orr_posterior(design_.control_prior_a,
                                    design_.control_prior_b, ctrl.n_mature,
                                    ctrl.y);
    st.posteriors.reserve(I);
    st.log_hr.reserve(I);
    for (int i = 1; i <= I; ++i) {
      const PriorAt pr = prior_at(design_.priors, design_.dose_levels[i - 1]);
      const auto& arm = st.arms[i];
      const OrrPosterior orrp = orr_posterior(pr.a, pr.b, arm.n_mature, arm.y);
      const int m1 = arm.deaths + ctrl.deaths;
      const double lh = estimate_log_hr(arm, ctrl);
      st.log_hr.push_back(lh);
      const HrPosterior hrp = hr_posterior(lh, m1, pr.mu, pr.sigma);
      st.posteriors.push_back(joint_posterior(orrp, hrp, design_.rho1));
    }
    st.selected_arm = select_optimal_dose(st.posteriors, design_.dose_score_rule);
    st.gate = gate_stats(st.posteriors[st.selected_arm], st.control_post, design_);
    st.decision = decide(st.posteriors[st.selected_arm], st.control_post, design_);
    st.decision.selected_arm = st.selected_arm;
    st.m1_selected = st.arms[st.selected_arm + 1].deaths + ctrl.deaths;
    st.log_hr_selected = st.log_hr[st.selected_arm];
    return st;
  }

  TrialOutcome run(std::uint64_t seed, std::uint32_t replicate) const {
    detail::InterimState st = interim_stage(seed, replicate);
    TrialOutcome out;
    if (st.trigger_failed) {
      out.trigger_failed = true;
      return out;
    }
    out.selected_arm = st.selected_arm;
    out.decision = st.decision;
    out.interim_time_months = st.t_interim;
    out.gate_delta = st.gate.delta;
    out.gate_sd = st.gate.sd;
    out.m1_selected = st.m1_selected;
    out.log_hr_selected = st.log_hr_selected;
    out.n_enrolled_at_interim = st.n_arrivals;

    if (st.decision.action == Action::kTerminate) {
      out.endpoint_used = Endpoint::kNone;
      out.events_counted = st.m1_selected;
      out.duration_months = st.t_interim;
      return out;
    }

    int target = 0;
    if (st.decision.action == Action::kExpandPhaseIII) {
      const PriorAt pr = prior_at(design_.priors,
                                  design_.dose_levels[st.selected_arm]);
      PposInputs in;
      in.m1 = st.m1_selected;
      in.log_hr_hat = st.log_hr_selected;
      in.mu_d = pr.mu;
      in.sigma_d = pr.sigma;
      in.z_alpha = z_alpha_;
      in.z_t = interim_z(st.log_hr_selected, st.m1_selected);
      const ReestimateResult rr = reestimate_events(
          in, design_.m2_planned, design_.m2_max, design_.power_target,
          design_.ssr_t_rule);
      out.decision.adjusted_m2 = rr.m2;
      out.decision.ppos_at_adjusted = rr.ppos_at_m2;
      out.endpoint_used = Endpoint::kOS;
      target = st.m1_selected + rr.m2;
    } else {
      out.endpoint_used = Endpoint::kPFS;
      target = design_.phase2_events;
    }
    run_continuation(seed, replicate, st, target, out);
    return out;
  }

 private:
  // Arrival of the n-th participant (1-based), jittered inside its accrual
  // slot (n/rate, (n+1)/rate). Strictly increasing in n, and at most
  // rate * t participants have arrived by month t.
  double arrival(std::uint64_t seed, std::uint32_t replicate,
                 std::int64_t n) const {
    RandomStream rs = RandomStream(seed, replicate, kStreamAccrual)
                          .at_entity(static_cast<std::uint32_t>(n));
    return (static_cast<double>(n) + rs.next_double()) /
           scen_.accrual_rate_per_month;
  }

  // Permuted-block randomization over all I+1 arms before the interim.
  int pre_interim_arm(std::uint64_t seed, std::uint32_t replicate,
                      std::int64_t n) const {
    const int n_arms = design_.n_doses() + 1;
    const std::int64_t block = (n - 1) / n_arms;
    const int pos = static_cast<int>((n - 1) % n_arms);
    RandomStream rs = RandomStream(seed, replicate, kStreamBlocks)
                          .at_entity(static_cast<std::uint32_t>(block));
    int perm[16];
    for (int i = 0; i < n_arms; ++i) perm[i] = i;
    for (int i = n_arms - 1; i > 0; --i) {
      const int j = static_cast<int>(rs.next_below(static_cast<std::uint32_t>(i + 1)));
      std::swap(perm[i], perm[j]);
    }
    return perm[pos];
  }

  // Post-interim blocks of two over {control, selected dose arm}.
  int post_interim_arm(std::uint64_t seed, std::uint32_t replicate,
                       std::int64_t post_index, int selected_arm_index) const {
    const std::int64_t block = (post_index - 1) / 2;
    const int pos = static_cast<int>((post_index - 1) % 2);
    RandomStream rs = RandomStream(seed, replicate, kStreamBlocksPost)
                          .at_entity(static_cast<std::uint32_t>(block));
    const bool control_first = rs.next_below(2) == 0;
    const bool is_control = (pos == 0) == control_first;
    return is_control ? 0 : selected_arm_index;
  }

  // Calendar time of the k-th control-arm OS event. Later enrollees cannot
  // move an order statistic below their own arrival time, so the scan stops
  // once the next control arrival passes the current k-th smallest death.
  double control_event_time(std::uint64_t seed, std::uint32_t replicate,
                            int k, int cap) const {
    const int n_arms = design_.n_doses() + 1;
    std::vector<double> heap;  // max-heap of the k smallest deaths
    heap.reserve(k);
    RandomStream pat(seed, replicate, kStreamPatient);
    for (std::int64_t block = 0; block < cap; ++block) {
      std::int64_t n_control = -1;
      for (int pos = 0; pos < n_arms; ++pos) {
        const std::int64_t n = block * n_arms + pos + 1;
        if (pre_interim_arm(seed, replicate, n) == 0) {
          n_control = n;
          break;
        }
      }
      const double arr = arrival(seed, replicate, n_control);
      if (static_cast<int>(heap.size()) == k && arr > heap.front()) break;
      const PatientRecord p = generate_patient(
          0, arr, sampler_, pat.at_entity(static_cast<std::uint32_t>(n_control)));
      const double death = arr + p.os_time;
      if (static_cast<int>(heap.size()) < k) {
        heap.push_back(death);
        std::push_heap(heap.begin(), heap.end());
      } else if (death < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = death;
        std::push_heap(heap.begin(), heap.end());
      }
    }
    if (static_cast<int>(heap.size()) < k) {
      return std::numeric_limits<double>::infinity();
    }
    return heap.front();
  }

  double estimate_log_hr(const detail::ArmSnapshot& arm,
                         const detail::ArmSnapshot& ctrl) const {
    if (!(arm.exposure > 0.0) || !(ctrl.exposure > 0.0)) return 0.0;
    // exponential event-rate MLE; half-event correction keeps zero-event
    // arms finite
    double da = arm.deaths, d0 = ctrl.deaths;
    if (arm.deaths == 0 || ctrl.deaths == 0) {
      da += 0.5;
      d0 += 0.5;
    }
    return std::log((da / arm.exposure) / (d0 / ctrl.exposure));
  }

  void run_continuation(std::uint64_t seed, std::uint32_t replicate,
                        const detail::InterimState& st, int target,
                        TrialOutcome& out) const {
    const bool use_os = out.endpoint_used == Endpoint::kOS;
    const int sel = st.selected_arm + 1;
    const int cap = scen_.max_enrollment_per_arm;

    struct Subj {
      double arrival;
      double duration;  // endpoint time from enrollment
      bool treated;
    };
    std::vector<Subj> subjects;
    std::vector<double> events;
    subjects.reserve(256);
    events.reserve(256);
    auto add = [&](const PatientRecord& p, bool treated) {
      const double dur = use_os ? p.os_time : p.pfs_time;
      subjects.push_back({p.enroll_time, dur, treated});
      events.push_back(p.enroll_time + dur);
    };
    for (const auto& p : st.arms[0].patients) add(p, false);
    for (const auto& p : st.arms[sel].patients) add(p, true);

    int count_ctrl = st.arms[0].n_enrolled;
    int count_sel = st.arms[sel].n_enrolled;
    RandomStream pat(seed, replicate, kStreamPatient);

    // extend enrollment until the target event order statistic is pinned
    auto kth_event = [&]() {
      std::vector<double> tmp(events);
      std::nth_element(tmp.begin(), tmp.begin() + (target - 1), tmp.end());
      return tmp[target - 1];
    };
    std::int64_t post = 0;
    bool open = count_ctrl < cap || count_sel < cap;
    while (true) {
      if (static_cast<int>(events.size()) >= target) {
        const double kth = kth_event();
        if (!open || arrival(seed, replicate, st.n_arrivals + post + 1) > kth) {
          break;
        }
      } else if (!open) {
        break;
      }
      // enroll the next chunk of arrivals
      for (int step = 0; step < 64 && open; ++step) {
        ++post;
        const std::int64_t n = st.n_arrivals + post;
        const int arm = post_interim_arm(seed, replicate, post, sel);
        int& cnt = (arm == 0) ? count_ctrl : count_sel;
        if (cnt >= cap) {
          open = count_ctrl < cap || count_sel < cap;
          continue;
        }
        const double arr = arrival(seed, replicate, n);
        const PatientRecord p = generate_patient(
            arm, arr, sampler_, pat.at_entity(static_cast<std::uint32_t>(n)));
        add(p, arm != 0);
        ++cnt;
        open = count_ctrl < cap || count_sel < cap;
      }
    }

    double t_final;
    if (static_cast<int>(events.size()) < target) {
      out.underrun = true;
      t_final = *std::max_element(events.begin(), events.end());
    } else {
      t_final = kth_event();
    }
    t_final = std::max(t_final, st.t_interim);

    std::vector<SurvObs> treated, control;
    int n_events = 0;
    for (const auto& s : subjects) {
      if (s.arrival > t_final) continue;  // never enrolled
      const bool ev = s.arrival + s.duration <= t_final;
      n_events += ev ? 1 : 0;
      const double obs = ev ? s.duration : t_final - s.arrival;
      (s.treated ? treated : control).push_back({obs, ev});
    }
    out.events_counted = n_events;
    out.duration_months = t_final;
    try {
      out.final_z = logrank_z(treated, control);
      out.final_test_passed = out.final_z <= z_alpha_;
    } catch (const std::exception&) {
      out.degenerate_final = true;
      out.final_test_passed = false;
    }
  }

  const DesignSpec& design_;
  const ScenarioSpec& scen_;
  ScenarioSampler sampler_;
  double z_alpha_;
};

}  // namespace sddo
