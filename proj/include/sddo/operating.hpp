#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "sddo/design.hpp"
#include "sddo/trial.hpp"

namespace sddo {

/// Flat per-replicate record; the raw-output CSV is written from these.
struct ReplicateRecord {
  int replicate = 0;
  bool trigger_failed = false;
  int selected_dose = 0;  // 1-based; 0 when trigger failed
  Action action = Action::kTerminate;
  double futility_prob = 0.0;
  double significance_prob = 0.0;
  int adjusted_m2 = 0;  // 0 when not expanded
  double ppos_at_adjusted = std::numeric_limits<double>::quiet_NaN();
  bool aa_supportable = false;
  bool final_test_passed = false;
  Endpoint endpoint = Endpoint::kNone;
  int events_counted = 0;
  double duration_months = 0.0;
  double interim_time_months = 0.0;
  bool underrun = false;
  bool degenerate_final = false;
};

struct DecisionBreakdown {
  int count = 0;
  double pct = 0.0;
  double positive_rate = 0.0;
  double positive_true_optimal_rate = 0.0;
  double mean_event_size = 0.0;
  double mean_duration_months = 0.0;
};

/// Aggregate operating characteristics over the included (non-failed)
/// replicates, overall and by interim decision.
struct OperatingCharacteristics {
  int n_replicates = 0;
  int n_included = 0;
  int n_trigger_failed = 0;
  int n_underrun = 0;
  int n_degenerate = 0;
  std::vector<double> optimal_dose_pct;  // per dose, sums to 1
  double decision_pct[3] = {0, 0, 0};    // indexed by Action
  double positive_rate_overall = 0.0;
  // joint rate of (positive result and selected dose in the true-optimal
  // set); the paper's bracketed rates
  double positive_rate_given_true_optimal = 0.0;
  double positive_rate_by_decision[3] = {0, 0, 0};
  double expected_event_size = 0.0;
  double expected_duration_months = 0.0;
  double mean_adjusted_m2 = std::numeric_limits<double>::quiet_NaN();
  double mean_interim_time_months = 0.0;
  double aa_supportable_rate = 0.0;
  DecisionBreakdown by_decision[3];
};

struct SimulationResult {
  OperatingCharacteristics oc;
  std::vector<ReplicateRecord> replicates;
};

inline ReplicateRecord to_record(const TrialOutcome& t, int replicate,
                                 double aa_threshold) {
  ReplicateRecord r;
  r.replicate = replicate;
  r.trigger_failed = t.trigger_failed;
  if (t.trigger_failed) return r;
  r.selected_dose = t.selected_arm + 1;
  r.action = t.decision.action;
  r.futility_prob = t.decision.futility_prob;
  r.significance_prob = t.decision.significance_prob;
  if (t.decision.adjusted_m2) {
    r.adjusted_m2 = *t.decision.adjusted_m2;
    r.ppos_at_adjusted = *t.decision.ppos_at_adjusted;
    r.aa_supportable = r.ppos_at_adjusted >= aa_threshold;
  }
  r.final_test_passed = t.final_test_passed;
  r.endpoint = t.endpoint_used;
  r.events_counted = t.events_counted;
  r.duration_months = t.duration_months;
  r.interim_time_months = t.interim_time_months;
  r.underrun = t.underrun;
  r.degenerate_final = t.degenerate_final;
  return r;
}

inline OperatingCharacteristics aggregate(
    const std::vector<ReplicateRecord>& recs, const DesignSpec& design,
    const ScenarioSpec& scen) {
  OperatingCharacteristics oc;
  oc.n_replicates = static_cast<int>(recs.size());
  oc.optimal_dose_pct.assign(design.n_doses(), 0.0);

  const std::vector<int> truth = true_optimal_doses(design, scen);
  auto is_true_optimal = [&truth](int dose) {
    for (int t : truth) if (t == dose) return true;
    return false;
  };

  int counts[3] = {0, 0, 0};
  int positives[3] = {0, 0, 0};
  int joint[3] = {0, 0, 0};
  double events[3] = {0, 0, 0};
  double durations[3] = {0, 0, 0};
  double sum_m2 = 0.0;
  int n_m2 = 0, n_aa = 0;
  double sum_events = 0.0, sum_duration = 0.0, sum_interim = 0.0;

  for (const auto& r : recs) {
    if (r.trigger_failed) {
      ++oc.n_trigger_failed;
      continue;
    }
    ++oc.n_included;
    oc.n_underrun += r.underrun ? 1 : 0;
    oc.n_degenerate += r.degenerate_final ? 1 : 0;
    oc.optimal_dose_pct[r.selected_dose - 1] += 1.0;
    const int a = static_cast<int>(r.action);
    ++counts[a];
    positives[a] += r.final_test_passed ? 1 : 0;
    joint[a] += (r.final_test_passed && is_true_optimal(r.selected_dose)) ? 1 : 0;
    events[a] += r.events_counted;
    durations[a] += r.duration_months;
    sum_events += r.events_counted;
    sum_duration += r.duration_months;
    sum_interim += r.interim_time_months;
    if (r.action == Action::kExpandPhaseIII) {
      sum_m2 += r.adjusted_m2;
      ++n_m2;
      n_aa += r.aa_supportable ? 1 : 0;
    }
  }
  if (oc.n_included == 0) return oc;
  const double n = oc.n_included;
  for (auto& v : oc.optimal_dose_pct) v /= n;
  int pos_total = 0, joint_total = 0;
  for (int a = 0; a < 3; ++a) {
    oc.decision_pct[a] = counts[a] / n;
    oc.positive_rate_by_decision[a] = counts[a] ? positives[a] / static_cast<double>(counts[a]) : 0.0;
    pos_total += positives[a];
    joint_total += joint[a];
    auto& bd = oc.by_decision[a];
    bd.count = counts[a];
    bd.pct = oc.decision_pct[a];
    bd.positive_rate = oc.positive_rate_by_decision[a];
    bd.positive_true_optimal_rate = counts[a] ? joint[a] / static_cast<double>(counts[a]) : 0.0;
    bd.mean_event_size = counts[a] ? events[a] / counts[a] : 0.0;
    bd.mean_duration_months = counts[a] ? durations[a] / counts[a] : 0.0;
  }
  oc.positive_rate_overall = pos_total / n;
  oc.positive_rate_given_true_optimal = joint_total / n;
  oc.expected_event_size = sum_events / n;
  oc.expected_duration_months = sum_duration / n;
  oc.mean_interim_time_months = sum_interim / n;
  if (n_m2 > 0) {
    oc.mean_adjusted_m2 = sum_m2 / n_m2;
    oc.aa_supportable_rate = n_aa / static_cast<double>(n_m2);
  }
  return oc;
}

/// Runs n_reps independent trial replicates (replicate indices 0..n_reps-1)
/// and aggregates. Replicates land in pre-assigned slots, so the result is
/// byte-identical for any worker count.
inline SimulationResult operating_characteristics(const DesignSpec& design,
                                                  const ScenarioSpec& scen,
                                                  int n_reps,
                                                  std::uint64_t seed,
                                                  int workers = 1) {
  if (n_reps < 1) throw config_error("n_reps must be at least 1");
  if (workers < 1) workers = 1;

  const TrialSimulator sim(design, scen);
  const double aa_thr = design.aa_threshold();
  std::vector<ReplicateRecord> recs(n_reps);

  if (workers == 1) {
    for (int i = 0; i < n_reps; ++i) {
      recs[i] = to_record(sim.run(seed, static_cast<std::uint32_t>(i)), i, aa_thr);
    }
  } else {
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n_reps) break;
        recs[i] = to_record(sim.run(seed, static_cast<std::uint32_t>(i)), i, aa_thr);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return {aggregate(recs, design, scen), std::move(recs)};
}

}  // namespace sddo
