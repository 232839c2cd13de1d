#pragma once

#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sddo/calibration.hpp"
#include "sddo/operating.hpp"
#include "sddo/version.hpp"

namespace sddo {

using ordered_json = nlohmann::ordered_json;

/// FNV-1a 64-bit content hash, printed as 16 hex digits.
inline std::string digest_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace detail {

inline std::string csv_num(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace detail

/// Summary table mirroring the published layout: one row per decision
/// branch plus an overall row, with dose-selection percentages repeated on
/// each row.
inline std::string oc_summary_csv(const std::string& scenario_name,
                                  const OperatingCharacteristics& oc) {
  std::ostringstream os;
  os << "scenario,branch,n_replicates,decision_pct,positive_rate,"
        "positive_rate_true_optimal,expected_event_size,"
        "expected_duration_months,mean_adjusted_m2,aa_supportable_rate,"
        "n_trigger_failed";
  for (std::size_t i = 0; i < oc.optimal_dose_pct.size(); ++i) {
    os << ",dose" << (i + 1) << "_selected_pct";
  }
  os << "\n";

  auto row = [&](const std::string& branch, double pct, double pos,
                 double joint, double events, double duration, double m2,
                 double aa, int n) {
    os << scenario_name << "," << branch << "," << n << ","
       << detail::csv_num(pct) << "," << detail::csv_num(pos) << ","
       << detail::csv_num(joint) << "," << detail::csv_num(events) << ","
       << detail::csv_num(duration) << "," << detail::csv_num(m2) << ","
       << detail::csv_num(aa) << "," << oc.n_trigger_failed;
    for (double d : oc.optimal_dose_pct) os << "," << detail::csv_num(d);
    os << "\n";
  };

  row("overall", 1.0, oc.positive_rate_overall,
      oc.positive_rate_given_true_optimal, oc.expected_event_size,
      oc.expected_duration_months, oc.mean_adjusted_m2,
      oc.aa_supportable_rate, oc.n_included);
  static constexpr Action kActions[3] = {Action::kTerminate,
                                         Action::kContinuePhaseII,
                                         Action::kExpandPhaseIII};
  for (Action a : kActions) {
    const auto& b = oc.by_decision[static_cast<int>(a)];
    const bool expand = a == Action::kExpandPhaseIII;
    row(to_string(a), b.pct, b.positive_rate, b.positive_true_optimal_rate,
        b.mean_event_size, b.mean_duration_months,
        expand ? oc.mean_adjusted_m2 : std::nan(""),
        expand ? oc.aa_supportable_rate : std::nan(""), b.count);
  }
  return os.str();
}

inline std::string replicates_csv(const std::vector<ReplicateRecord>& recs) {
  std::ostringstream os;
  os << "replicate,trigger_failed,selected_dose,action,futility_prob,"
        "significance_prob,adjusted_m2,ppos_at_adjusted,aa_supportable,"
        "final_test_passed,endpoint,events_counted,duration_months,"
        "interim_time_months,underrun,degenerate_final\n";
  for (const auto& r : recs) {
    os << r.replicate << "," << (r.trigger_failed ? 1 : 0) << ",";
    if (r.trigger_failed) {
      os << ",,,,,,,,,,,,\n";
      continue;
    }
    os << r.selected_dose << "," << to_string(r.action) << ","
       << detail::csv_num(r.futility_prob) << ","
       << detail::csv_num(r.significance_prob) << ",";
    if (r.adjusted_m2 > 0) {
      os << r.adjusted_m2 << "," << detail::csv_num(r.ppos_at_adjusted) << ","
         << (r.aa_supportable ? 1 : 0) << ",";
    } else {
      os << ",,,";
    }
    os << (r.final_test_passed ? 1 : 0) << "," << to_string(r.endpoint) << ","
       << r.events_counted << "," << detail::csv_num(r.duration_months) << ","
       << detail::csv_num(r.interim_time_months) << "," << (r.underrun ? 1 : 0)
       << "," << (r.degenerate_final ? 1 : 0) << "\n";
  }
  return os.str();
}

inline std::string manifest_json(const std::string& config_path,
                                 const std::string& config_digest,
                                 std::uint64_t seed, int n_reps, int workers,
                                 const std::string& output_dir,
                                 const std::string& summary_digest,
                                 const std::string& replicates_digest) {
  ordered_json j;
  j["engine"] = "sddo";
  j["engine_version"] = kVersion;
  j["config_path"] = config_path;
  j["config_digest"] = config_digest;
  j["seed"] = seed;
  j["n_reps"] = n_reps;
  j["workers"] = workers;
  j["output_dir"] = output_dir;
  j["results_digest"]["oc_summary_csv"] = summary_digest;
  j["results_digest"]["replicates_csv"] = replicates_digest;
  return j.dump(2) + "\n";
}

inline std::string calibration_json(const CalibrationResult& t0,
                                    const CalibrationResult& t1,
                                    const CalibrationTarget& target,
                                    std::uint64_t seed,
                                    const std::vector<int>& sweep_doses = {},
                                    const std::vector<double>& sweep_tau1 = {}) {
  ordered_json j;
  j["engine_version"] = kVersion;
  j["seed"] = seed;
  j["targets"]["false_negative_cap"] = target.false_negative_cap;
  j["targets"]["false_positive_cap"] = target.false_positive_cap;
  j["targets"]["orr_shift_for_fn"] = target.orr_shift_for_fn;
  j["grid"]["lo"] = target.grid_lo;
  j["grid"]["hi"] = target.grid_hi;
  j["grid"]["step"] = target.grid_step;
  j["n_sims_per_point"] = target.n_sims_per_point;
  j["tau0"]["value"] = t0.tau;
  j["tau0"]["achieved_probability"] = t0.achieved_probability;
  j["tau0"]["mc_se"] = t0.mc_se;
  j["tau0"]["boundary"] = t0.boundary;
  j["tau0"]["n_effective"] = t0.n_effective;
  j["tau1"]["value"] = t1.tau;
  j["tau1"]["achieved_probability"] = t1.achieved_probability;
  j["tau1"]["mc_se"] = t1.mc_se;
  j["tau1"]["boundary"] = t1.boundary;
  j["tau1"]["n_effective"] = t1.n_effective;
  if (!sweep_doses.empty()) {
    for (std::size_t i = 0; i < sweep_doses.size(); ++i) {
      ordered_json e;
      e["n_doses"] = sweep_doses[i];
      e["tau1"] = sweep_tau1[i];
      j["tau1_by_n_doses"].push_back(e);
    }
  }
  return j.dump(2) + "\n";
}

inline std::string bounds_csv(
    const std::vector<std::array<double, 6>>& rows) {
  // columns: I, t, alpha3, a2, overall_bound, exceeds_alpha(0/1)
  std::ostringstream os;
  os << "doses,t,alpha3,a2,overall_bound,exceeds_alpha\n";
  for (const auto& r : rows) {
    os << static_cast<int>(r[0]) << "," << detail::csv_num(r[1]) << ","
       << detail::csv_num(r[2]) << "," << detail::csv_num(r[3]) << ","
       << detail::csv_num(r[4]) << "," << static_cast<int>(r[5]) << "\n";
  }
  return os.str();
}

inline std::string ppos_csv(const std::vector<std::array<double, 2>>& rows,
                            int adjusted_m2, double ppos_at_adjusted,
                            bool aa_supportable) {
  std::ostringstream os;
  os << "m2_tilde,ppos\n";
  for (const auto& r : rows) {
    os << static_cast<long long>(r[0]) << "," << detail::csv_num(r[1]) << "\n";
  }
  os << "# adjusted_m2=" << adjusted_m2
     << " ppos_at_adjusted=" << detail::csv_num(ppos_at_adjusted)
     << " aa_supportable=" << (aa_supportable ? 1 : 0) << "\n";
  return os.str();
}

}  // namespace sddo
