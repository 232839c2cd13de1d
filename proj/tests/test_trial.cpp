#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "sddo/operating.hpp"
#include "sddo/report.hpp"
#include "sddo/trial.hpp"
#include "test_util.hpp"

using namespace sddo;
using namespace sddo_test;

TEST_CASE("interim trigger respects the accrual lower bound") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = global_null_scenario();
  const TrialSimulator sim(d, s);
  // 60 mature per arm needs 240 arrivals at 20/month plus the readout lag
  const double bound = (60.0 * 4.0 / 20.0) + 4.2;
  for (std::uint32_t rep = 0; rep < 200; ++rep) {
    const auto st = sim.interim_stage(1234, rep);
    REQUIRE_FALSE(st.trigger_failed);
    CHECK(st.t_interim >= bound);
    for (int arm = 0; arm <= 3; ++arm) {
      CHECK(st.arms[arm].n_mature >= 60);
    }
    CHECK(st.arms[0].deaths >= 30);
  }
}

TEST_CASE("interim snapshot is internally consistent") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = one_significant_scenario();
  const TrialSimulator sim(d, s);
  for (std::uint32_t rep = 0; rep < 50; ++rep) {
    const auto st = sim.interim_stage(99, rep);
    REQUIRE_FALSE(st.trigger_failed);
    int enrolled = 0;
    for (const auto& arm : st.arms) {
      enrolled += arm.n_enrolled;
      CHECK(arm.n_mature <= arm.n_enrolled);
      CHECK(arm.y <= arm.n_mature);
      CHECK(arm.deaths <= arm.n_enrolled);
      CHECK(arm.exposure > 0.0);
    }
    CHECK(enrolled == st.n_arrivals);
    // permuted blocks keep arms within one patient of each other
    for (int a = 1; a <= 3; ++a) {
      CHECK(std::abs(st.arms[a].n_enrolled - st.arms[0].n_enrolled) <= 1);
    }
    CHECK(st.m1_selected ==
          st.arms[st.selected_arm + 1].deaths + st.arms[0].deaths);
  }
}

TEST_CASE("enrollment cap below the maturity requirement fails the trigger") {
  const DesignSpec d = standard_design();
  ScenarioSpec s = global_null_scenario();
  s.max_enrollment_per_arm = 40;  // below the 60 mature per arm requirement
  const TrialSimulator sim(d, s);
  const TrialOutcome out = sim.run(7, 0);
  CHECK(out.trigger_failed);

  const auto res = operating_characteristics(d, s, 50, 7, 1);
  CHECK(res.oc.n_trigger_failed == 50);
  CHECK(res.oc.n_included == 0);
}

TEST_CASE("phase III event accounting matches m1 plus the adjusted size") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = one_significant_scenario();
  const auto res = operating_characteristics(d, s, 300, 2024, 1);
  int n_checked = 0;
  for (const auto& r : res.replicates) {
    REQUIRE_FALSE(r.trigger_failed);
    if (r.action != Action::kExpandPhaseIII) continue;
    REQUIRE(r.adjusted_m2 >= d.m2_planned);
    REQUIRE(r.adjusted_m2 <= d.m2_max);
    if (!r.underrun) {
      // recover m1 from the trial internals
      const TrialSimulator sim(d, s);
      const TrialOutcome out = sim.run(2024, r.replicate);
      CHECK(out.events_counted == out.m1_selected + r.adjusted_m2);
      ++n_checked;
    }
    if (n_checked >= 40) break;
  }
  CHECK(n_checked >= 20);
}

TEST_CASE("phase II analyses stop at the planned event size") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = global_null_scenario();
  const auto res = operating_characteristics(d, s, 400, 5, 1);
  int n_p2 = 0;
  for (const auto& r : res.replicates) {
    if (r.action != Action::kContinuePhaseII || r.underrun) continue;
    CHECK(r.events_counted == d.phase2_events);
    CHECK(r.endpoint == Endpoint::kPFS);
    CHECK(r.duration_months >= r.interim_time_months);
    ++n_p2;
  }
  CHECK(n_p2 > 150);
}

TEST_CASE("terminated replicates report interim events and time") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = global_null_scenario();
  const auto res = operating_characteristics(d, s, 400, 6, 1);
  int n_term = 0;
  for (const auto& r : res.replicates) {
    if (r.action != Action::kTerminate) continue;
    CHECK(r.endpoint == Endpoint::kNone);
    CHECK_FALSE(r.final_test_passed);
    CHECK(r.duration_months == r.interim_time_months);
    CHECK(r.events_counted >= d.interim_min_control_os_events);
    ++n_term;
  }
  CHECK(n_term > 80);
}

TEST_CASE("an unreachable event target underruns at the enrollment cap") {
  DesignSpec d = standard_design();
  d.tau0 = -1.0;  // futility gate always passes
  d.tau1 = 1.0;   // significance gate never fires: always Phase II
  d.phase2_events = 5000;
  ScenarioSpec s = global_null_scenario();
  s.max_enrollment_per_arm = 150;
  const TrialSimulator sim(d, s);
  const TrialOutcome out = sim.run(11, 3);
  REQUIRE_FALSE(out.trigger_failed);
  REQUIRE(out.decision.action == Action::kContinuePhaseII);
  CHECK(out.underrun);
  CHECK(out.events_counted < d.phase2_events);
  CHECK(out.events_counted > 0);
}

TEST_CASE("single replicate yields a point-mass decision split") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = global_null_scenario();
  const auto res = operating_characteristics(d, s, 1, 42, 1);
  double total = 0;
  int nonzero = 0;
  for (double p : res.oc.decision_pct) {
    total += p;
    nonzero += (p > 0) ? 1 : 0;
  }
  CHECK(total == 1.0);
  CHECK(nonzero == 1);
}

TEST_CASE("replicate records are identical for any worker count") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = one_significant_scenario();
  const auto r1 = operating_characteristics(d, s, 200, 31415, 1);
  const auto r4 = operating_characteristics(d, s, 200, 31415, 4);
  REQUIRE(r1.replicates.size() == r4.replicates.size());
  CHECK(replicates_csv(r1.replicates) == replicates_csv(r4.replicates));
  CHECK(oc_summary_csv("x", r1.oc) == oc_summary_csv("x", r4.oc));
}

TEST_CASE("symmetric scenario selects each dose about equally") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = global_null_scenario();
  const auto res = operating_characteristics(d, s, 2400, 8, 1);
  REQUIRE(res.oc.n_included == 2400);
  for (double pct : res.oc.optimal_dose_pct) {
    CHECK_THAT(pct, Catch::Matchers::WithinAbs(1.0 / 3.0, 0.035));
  }
  double sum = 0;
  for (double pct : res.oc.optimal_dose_pct) sum += pct;
  CHECK_THAT(sum, Catch::Matchers::WithinAbs(1.0, 1e-9));
  double dsum = 0;
  for (double p : res.oc.decision_pct) dsum += p;
  CHECK_THAT(dsum, Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("aggregates are consistent with their per-replicate records") {
  const DesignSpec d = standard_design();
  const ScenarioSpec s = one_significant_scenario();
  const auto res = operating_characteristics(d, s, 300, 12, 1);
  int pos = 0;
  double ev = 0;
  for (const auto& r : res.replicates) {
    pos += r.final_test_passed ? 1 : 0;
    ev += r.events_counted;
  }
  CHECK_THAT(res.oc.positive_rate_overall,
             Catch::Matchers::WithinAbs(pos / 300.0, 1e-12));
  CHECK_THAT(res.oc.expected_event_size,
             Catch::Matchers::WithinAbs(ev / 300.0, 1e-9));
  CHECK(res.oc.positive_rate_given_true_optimal <=
        res.oc.positive_rate_overall + 1e-12);
}
