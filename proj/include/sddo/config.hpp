#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sddo/design.hpp"
#include "sddo/errors.hpp"

namespace sddo {

struct Config {
  DesignSpec design;
  ScenarioSpec scenario;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw config_error(key + ": cannot parse '" + v + "' as a number");
  }
  return x;
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x) {
    throw config_error(key + ": expected an integer, got '" + v + "'");
  }
  return i;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw config_error(key + ": expected true/false, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw config_error(key + ": empty list element");
    out.push_back(parse_double(key, item));
  }
  if (out.empty()) throw config_error(key + ": empty list");
  return out;
}

inline std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += fmt_double(xs[i]);
  }
  return out;
}

inline void apply_curve_key(DoseCurve& c, const std::string& section,
                            const std::string& key, const std::string& val) {
  if (key == "family") {
    try {
      c.family = curve_family_from_string(val);
    } catch (const std::domain_error& e) {
      throw config_error(section + ".family: " + e.what());
    }
  } else if (key == "c0") {
    c.c0 = parse_double(section + ".c0", val);
  } else if (key == "c1") {
    c.c1 = parse_double(section + ".c1", val);
  } else if (key == "c2") {
    c.c2 = parse_double(section + ".c2", val);
  } else if (key == "c3") {
    c.c3 = parse_double(section + ".c3", val);
  } else {
    throw config_error(section + "." + key + ": unknown key");
  }
}

inline void write_curve(std::ostream& os, const std::string& section,
                        const DoseCurve& c) {
  os << "[" << section << "]\n";
  os << "family = " << to_string(c.family) << "\n";
  os << "c0 = " << fmt_double(c.c0) << "\n";
  if (c.family != CurveFamily::kConstant) {
    os << "c1 = " << fmt_double(c.c1) << "\n";
  }
  if (c.family == CurveFamily::kQuadratic || c.family == CurveFamily::kSigmoid) {
    os << "c2 = " << fmt_double(c.c2) << "\n";
  }
  if (c.family == CurveFamily::kSigmoid) {
    os << "c3 = " << fmt_double(c.c3) << "\n";
  }
  os << "\n";
}

}  // namespace detail

/// Parses the sectioned key-value config format. Unknown sections or keys
/// are errors; tau0/tau1 may be omitted (left NaN for later calibration).
inline Config parse_config(const std::string& text) {
  Config cfg;
  DesignSpec& d = cfg.design;
  ScenarioSpec& s = cfg.scenario;
  bool saw_dose_levels = false, saw_orr = false, saw_hr_pfs = false,
       saw_hr_os = false;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw config_error("line " + std::to_string(lineno) +
                           ": unterminated section header");
      }
      section = detail::trim(line.substr(1, line.size() - 2));
      if (section != "design" && section != "scenario" &&
          section != "design.priors.a_fn" && section != "design.priors.b_fn" &&
          section != "design.priors.mu_fn" &&
          section != "design.priors.sigma_fn") {
        throw config_error("line " + std::to_string(lineno) +
                           ": unknown section [" + section + "]");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(lineno) +
                         ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    const std::string path = section + "." + key;

    if (section == "design") {
      if (key == "dose_levels") { d.dose_levels = detail::parse_list(path, val); saw_dose_levels = true; }
      else if (key == "rho1") d.rho1 = detail::parse_double(path, val);
      else if (key == "s0") d.s0 = detail::parse_double(path, val);
      else if (key == "s1") d.s1 = detail::parse_double(path, val);
      else if (key == "tau0") d.tau0 = detail::parse_double(path, val);
      else if (key == "tau1") d.tau1 = detail::parse_double(path, val);
      else if (key == "phase2_events") d.phase2_events = detail::parse_int(path, val);
      else if (key == "m2_planned") d.m2_planned = detail::parse_int(path, val);
      else if (key == "m2_max") d.m2_max = detail::parse_int(path, val);
      else if (key == "alpha_one_sided") d.alpha_one_sided = detail::parse_double(path, val);
      else if (key == "power_target") d.power_target = detail::parse_double(path, val);
      else if (key == "interim_orr_n_per_arm") d.interim_orr_n_per_arm = detail::parse_int(path, val);
      else if (key == "interim_min_control_os_events") d.interim_min_control_os_events = detail::parse_int(path, val);
      else if (key == "argmax_tie_break") d.argmax_tie_break = val;
      else if (key == "control_prior_a") d.control_prior_a = detail::parse_double(path, val);
      else if (key == "control_prior_b") d.control_prior_b = detail::parse_double(path, val);
      else if (key == "dose_score_rule") {
        if (val == "anchored") d.dose_score_rule = DoseScoreRule::kAnchored;
        else if (val == "literal") d.dose_score_rule = DoseScoreRule::kLiteral;
        else throw config_error(path + ": expected anchored|literal");
      } else if (key == "ssr_t_rule") {
        if (val == "varying") d.ssr_t_rule = SsrTRule::kVarying;
        else if (val == "fixed_at_planned") d.ssr_t_rule = SsrTRule::kFixedAtPlanned;
        else throw config_error(path + ": expected varying|fixed_at_planned");
      } else if (key == "aa_ppos_threshold") {
        d.aa_ppos_threshold = detail::parse_double(path, val);
      } else {
        throw config_error(path + ": unknown key");
      }
    } else if (section == "design.priors.a_fn") {
      detail::apply_curve_key(d.priors.a_fn, section, key, val);
    } else if (section == "design.priors.b_fn") {
      detail::apply_curve_key(d.priors.b_fn, section, key, val);
    } else if (section == "design.priors.mu_fn") {
      detail::apply_curve_key(d.priors.mu_fn, section, key, val);
    } else if (section == "design.priors.sigma_fn") {
      detail::apply_curve_key(d.priors.sigma_fn, section, key, val);
    } else if (section == "scenario") {
      if (key == "name") s.name = val;
      else if (key == "orr") { s.orr = detail::parse_list(path, val); saw_orr = true; }
      else if (key == "hr_pfs") { s.hr_pfs = detail::parse_list(path, val); saw_hr_pfs = true; }
      else if (key == "hr_os") { s.hr_os = detail::parse_list(path, val); saw_hr_os = true; }
      else if (key == "control_median_os_months") s.control_median_os_months = detail::parse_double(path, val);
      else if (key == "control_median_pfs_months") s.control_median_pfs_months = detail::parse_double(path, val);
      else if (key == "accrual_rate_per_month") s.accrual_rate_per_month = detail::parse_double(path, val);
      else if (key == "response_readout_lag_months") s.response_readout_lag_months = detail::parse_double(path, val);
      else if (key == "latent_corr") {
        const auto xs = detail::parse_list(path, val);
        if (xs.size() != 9) throw config_error(path + ": expected 9 row-major entries");
        for (int i = 0; i < 9; ++i) s.latent_corr[i] = xs[i];
      } else if (key == "max_enrollment_per_arm") {
        s.max_enrollment_per_arm = detail::parse_int(path, val);
      } else if (key == "clamp_os_to_pfs") {
        s.clamp_os_to_pfs = detail::parse_bool(path, val);
      } else if (key == "true_optimal") {
        const auto xs = detail::parse_list(path, val);
        s.true_optimal.clear();
        for (double x : xs) s.true_optimal.push_back(detail::parse_int(path, detail::fmt_double(x)));
      } else {
        throw config_error(path + ": unknown key");
      }
    } else {
      throw config_error("line " + std::to_string(lineno) +
                         ": key outside of any section");
    }
  }
  if (!saw_dose_levels) throw config_error("design.dose_levels: required key missing");
  if (!saw_orr) throw config_error("scenario.orr: required key missing");
  if (!saw_hr_pfs) throw config_error("scenario.hr_pfs: required key missing");
  if (!saw_hr_os) throw config_error("scenario.hr_os: required key missing");
  return cfg;
}

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
inline std::string serialize_config(const Config& cfg) {
  const DesignSpec& d = cfg.design;
  const ScenarioSpec& s = cfg.scenario;
  std::ostringstream os;
  os << "[design]\n";
  os << "dose_levels = " << detail::join(d.dose_levels) << "\n";
  os << "rho1 = " << detail::fmt_double(d.rho1) << "\n";
  os << "s0 = " << detail::fmt_double(d.s0) << "\n";
  os << "s1 = " << detail::fmt_double(d.s1) << "\n";
  if (!std::isnan(d.tau0)) os << "tau0 = " << detail::fmt_double(d.tau0) << "\n";
  if (!std::isnan(d.tau1)) os << "tau1 = " << detail::fmt_double(d.tau1) << "\n";
  os << "phase2_events = " << d.phase2_events << "\n";
  os << "m2_planned = " << d.m2_planned << "\n";
  os << "m2_max = " << d.m2_max << "\n";
  os << "alpha_one_sided = " << detail::fmt_double(d.alpha_one_sided) << "\n";
  os << "power_target = " << detail::fmt_double(d.power_target) << "\n";
  os << "interim_orr_n_per_arm = " << d.interim_orr_n_per_arm << "\n";
  os << "interim_min_control_os_events = " << d.interim_min_control_os_events << "\n";
  os << "argmax_tie_break = " << d.argmax_tie_break << "\n";
  os << "control_prior_a = " << detail::fmt_double(d.control_prior_a) << "\n";
  os << "control_prior_b = " << detail::fmt_double(d.control_prior_b) << "\n";
  os << "dose_score_rule = " << to_string(d.dose_score_rule) << "\n";
  os << "ssr_t_rule = " << to_string(d.ssr_t_rule) << "\n";
  if (!std::isnan(d.aa_ppos_threshold)) {
    os << "aa_ppos_threshold = " << detail::fmt_double(d.aa_ppos_threshold) << "\n";
  }
  os << "\n";
  detail::write_curve(os, "design.priors.a_fn", d.priors.a_fn);
  detail::write_curve(os, "design.priors.b_fn", d.priors.b_fn);
  detail::write_curve(os, "design.priors.mu_fn", d.priors.mu_fn);
  detail::write_curve(os, "design.priors.sigma_fn", d.priors.sigma_fn);
  os << "[scenario]\n";
  os << "name = " << s.name << "\n";
  os << "orr = " << detail::join(s.orr) << "\n";
  os << "hr_pfs = " << detail::join(s.hr_pfs) << "\n";
  os << "hr_os = " << detail::join(s.hr_os) << "\n";
  os << "control_median_os_months = " << detail::fmt_double(s.control_median_os_months) << "\n";
  os << "control_median_pfs_months = " << detail::fmt_double(s.control_median_pfs_months) << "\n";
  os << "accrual_rate_per_month = " << detail::fmt_double(s.accrual_rate_per_month) << "\n";
  os << "response_readout_lag_months = " << detail::fmt_double(s.response_readout_lag_months) << "\n";
  os << "latent_corr = " << detail::join({s.latent_corr.begin(), s.latent_corr.end()}) << "\n";
  os << "max_enrollment_per_arm = " << s.max_enrollment_per_arm << "\n";
  os << "clamp_os_to_pfs = " << (s.clamp_os_to_pfs ? "true" : "false") << "\n";
  if (!s.true_optimal.empty()) {
    std::vector<double> xs(s.true_optimal.begin(), s.true_optimal.end());
    os << "true_optimal = " << detail::join(xs) << "\n";
  }
  return os.str();
}

inline Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace sddo
