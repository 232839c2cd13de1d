// Command-line front end: trial simulation, tau calibration, Type I error
// bound tables and PPoS curves.
//
// Exit codes: 0 success, 2 config/usage error, 3 numerical failure,
// 4 reproducibility mismatch against a manifest, 5 degenerate run
// (interim trigger failed in most replicates).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sddo/sddo.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitMismatch = 4;
constexpr int kExitDegenerate = 5;

int default_workers() {
  if (const char* env = std::getenv("SDDO_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return 1;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sddo::config_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

sddo::Config load_and_validate(const std::string& path, bool require_tau) {
  sddo::Config cfg = sddo::load_config_file(path);
  const auto errs = sddo::validate(cfg.design, cfg.scenario, require_tau);
  if (!errs.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw sddo::config_error(msg);
  }
  return cfg;
}

std::vector<double> parse_grid(const std::string& text) {
  // "lo:hi:step" or a comma list
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double lo = 0, hi = 0, step = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(text);
    ss >> lo >> c1 >> hi;
    if (ss >> c2 >> step) {
    } else {
      step = 1.0;
    }
    if (!(step > 0) || hi < lo) throw sddo::config_error("bad grid '" + text + "'");
    for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
    return out;
  }
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

struct SimulateArgs {
  std::string config;
  int reps = 10000;
  std::uint64_t seed = 1;
  int workers = default_workers();
  std::string out_dir = "sddo_out";
  std::string verify_manifest;
};

int run_simulate(const SimulateArgs& a) {
  std::string config_path = a.config;
  int reps = a.reps;
  std::uint64_t seed = a.seed;
  int workers = a.workers;
  std::string out_dir = a.out_dir;

  sddo::ordered_json manifest;
  if (!a.verify_manifest.empty()) {
    manifest = sddo::ordered_json::parse(read_file(a.verify_manifest));
    config_path = manifest["config_path"].get<std::string>();
    reps = manifest["n_reps"].get<int>();
    seed = manifest["seed"].get<std::uint64_t>();
    workers = manifest["workers"].get<int>();
  }
  if (reps < 1) throw sddo::config_error("--reps must be at least 1");

  const std::string config_text = read_file(config_path);
  const std::string config_digest = sddo::digest_hex(config_text);
  sddo::Config cfg = load_and_validate(config_path, /*require_tau=*/true);

  const auto res = sddo::operating_characteristics(cfg.design, cfg.scenario,
                                                   reps, seed, workers);
  const std::string summary =
      sddo::oc_summary_csv(cfg.scenario.name, res.oc);
  const std::string reps_csv = sddo::replicates_csv(res.replicates);
  const std::string summary_digest = sddo::digest_hex(summary);
  const std::string reps_digest = sddo::digest_hex(reps_csv);

  if (!a.verify_manifest.empty()) {
    const std::string want_summary =
        manifest["results_digest"]["oc_summary_csv"].get<std::string>();
    const std::string want_reps =
        manifest["results_digest"]["replicates_csv"].get<std::string>();
    if (want_summary != summary_digest || want_reps != reps_digest) {
      std::cerr << "reproducibility mismatch: digests differ from manifest\n";
      return kExitMismatch;
    }
    std::cout << "manifest verified: outputs reproduce exactly\n";
    return kExitOk;
  }

  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/oc_summary.csv", summary);
  write_file(out_dir + "/replicates.csv", reps_csv);
  write_file(out_dir + "/manifest.json",
             sddo::manifest_json(config_path, config_digest, seed, reps,
                                 workers, out_dir, summary_digest, reps_digest));
  std::cout << summary;
  if (res.oc.n_trigger_failed > 0) {
    std::cerr << "note: " << res.oc.n_trigger_failed
              << " replicates never reached the interim trigger\n";
  }
  if (res.oc.n_trigger_failed * 2 > res.oc.n_replicates) {
    std::cerr << "error: trigger failures dominate the run\n";
    return kExitDegenerate;
  }
  return kExitOk;
}

struct CalibrateArgs {
  std::string config;
  double target_fn = 0.05;
  double target_fp = 0.025;
  double shift = 0.15;
  double grid_step = 0.01;
  int sims = 10000;
  std::uint64_t seed = 1;
  int workers = default_workers();
  std::string sweep;
  std::string out_dir;
};

int run_calibrate(const CalibrateArgs& a) {
  sddo::Config cfg = load_and_validate(a.config, /*require_tau=*/false);
  sddo::CalibrationTarget target;
  target.false_negative_cap = a.target_fn;
  target.false_positive_cap = a.target_fp;
  target.orr_shift_for_fn = a.shift;
  target.grid_step = a.grid_step;
  target.n_sims_per_point = a.sims;

  const auto t0 = sddo::calibrate_tau0(cfg.design, cfg.scenario, target,
                                       a.seed, a.workers);
  sddo::DesignSpec with_tau0 = cfg.design;
  with_tau0.tau0 = t0.tau;
  const auto t1 = sddo::calibrate_tau1(with_tau0, cfg.scenario, target,
                                       a.seed, a.workers);

  auto report = [](const char* name, const sddo::CalibrationResult& r) {
    std::printf("%s = %.4f  (error rate %.4f, MC se %.4f%s)\n", name, r.tau,
                r.achieved_probability, r.mc_se,
                r.boundary ? ", cap unattainable: boundary value" : "");
  };
  report("tau0", t0);
  report("tau1", t1);

  std::vector<int> sweep_doses;
  std::vector<double> sweep_tau1;
  if (!a.sweep.empty()) {
    for (double v : parse_grid(a.sweep)) sweep_doses.push_back(static_cast<int>(v));
    for (int I : sweep_doses) {
      sddo::DesignSpec d = cfg.design;
      d.dose_levels.clear();
      for (int i = 1; i <= I; ++i) d.dose_levels.push_back(i);
      d.tau0 = t0.tau;
      sddo::ScenarioSpec s = cfg.scenario;
      s.orr.assign(I + 1, cfg.scenario.orr.at(0));
      s.hr_pfs.assign(I + 1, 1.0);
      s.hr_os.assign(I + 1, 1.0);
      const auto r = sddo::calibrate_tau1(d, s, target, a.seed, a.workers);
      sweep_tau1.push_back(r.tau);
      std::printf("tau1 with %d doses = %.4f\n", I, r.tau);
    }
  }
  if (!a.out_dir.empty()) {
    std::filesystem::create_directories(a.out_dir);
    write_file(a.out_dir + "/calibration.json",
               sddo::calibration_json(t0, t1, target, a.seed, sweep_doses,
                                      sweep_tau1));
  }
  return kExitOk;
}

struct BoundsArgs {
  int doses = 3;
  std::string t_grid = "0.1:0.9:0.1";
  int n0 = 60;
  double p0 = 0.2;
  double tau0 = -0.05;
  double s0 = 0.9;
  double alpha = 0.025;
  std::string out_file;
};

int run_bounds(const BoundsArgs& a) {
  std::vector<std::array<double, 6>> rows;
  bool any_exceeds = false;
  for (int I = 1; I <= a.doses; ++I) {
    const double a2 = sddo::a2_probability(I, a.n0, a.p0, a.tau0, a.s0, a.alpha);
    for (double t : parse_grid(a.t_grid)) {
      const double a3 = sddo::alpha3_upper_bound(I, t, a.alpha);
      const double bound = a2 * a.alpha + a.alpha * a3;
      const bool exceeds = bound >= a.alpha;
      any_exceeds |= exceeds;
      rows.push_back({static_cast<double>(I), t, a3, a2, bound,
                      exceeds ? 1.0 : 0.0});
    }
  }
  const std::string csv = sddo::bounds_csv(rows);
  std::cout << csv;
  if (!a.out_file.empty()) write_file(a.out_file, csv);
  if (any_exceeds) {
    std::cerr << "warning: some cells exceed the nominal alpha\n";
  }
  return kExitOk;
}

struct PposArgs {
  int m1 = 0;
  double loghr = 0.0;
  double mu = 0.0;
  double sigma = 8.0;
  double alpha = 0.025;
  double power = 0.9;
  int m2_planned = 226;
  int m2_max = 507;
  std::string m2_range;
  std::string out_file;
};

int run_ppos(const PposArgs& a) {
  sddo::PposInputs in;
  in.m1 = a.m1;
  in.log_hr_hat = a.loghr;
  in.mu_d = a.mu;
  in.sigma_d = a.sigma;
  in.z_alpha = sddo::normal_quantile(a.alpha);
  in.z_t = sddo::interim_z(a.loghr, a.m1);

  std::string range = a.m2_range.empty()
                          ? std::to_string(a.m2_planned) + ":" +
                                std::to_string(a.m2_max) + ":1"
                          : a.m2_range;
  std::vector<std::array<double, 2>> rows;
  for (double v : parse_grid(range)) {
    const long long m2 = static_cast<long long>(v);
    rows.push_back({static_cast<double>(m2), sddo::ppos(in, m2)});
  }
  const auto rr = sddo::reestimate_events(in, a.m2_planned, a.m2_max, a.power);
  const std::string csv =
      sddo::ppos_csv(rows, rr.m2, rr.ppos_at_m2, rr.ppos_at_m2 >= a.power);
  std::cout << csv;
  if (!a.out_file.empty()) write_file(a.out_file, csv);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDDO seamless Phase II/III trial design engine"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate",
                                   "simulate trials and write operating characteristics");
  c_sim->add_option("--config", sim.config, "config file");
  c_sim->add_option("--reps", sim.reps, "number of replicates");
  c_sim->add_option("--seed", sim.seed, "RNG seed");
  c_sim->add_option("--workers", sim.workers, "worker threads");
  c_sim->add_option("--out", sim.out_dir, "output directory");
  c_sim->add_option("--verify", sim.verify_manifest,
                    "re-run from a manifest and verify digests");

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "grid-search tau0 and tau1");
  c_cal->add_option("--config", cal.config, "config file")->required();
  c_cal->add_option("--target-fn", cal.target_fn, "false-negative cap");
  c_cal->add_option("--target-fp", cal.target_fp, "false-positive cap");
  c_cal->add_option("--shift", cal.shift, "ORR shift for the FN scenario");
  c_cal->add_option("--grid-step", cal.grid_step, "tau grid step");
  c_cal->add_option("--sims", cal.sims, "interim simulations per search");
  c_cal->add_option("--seed", cal.seed, "RNG seed");
  c_cal->add_option("--workers", cal.workers, "worker threads");
  c_cal->add_option("--sweep-doses", cal.sweep,
                    "also calibrate tau1 for these dose counts, e.g. 2:5");
  c_cal->add_option("--out", cal.out_dir, "directory for calibration.json");

  BoundsArgs bnd;
  auto* c_bnd = app.add_subcommand("bounds", "Type I error bound tables");
  c_bnd->add_option("--doses", bnd.doses, "max number of candidate doses");
  c_bnd->add_option("--t-grid", bnd.t_grid, "information fractions lo:hi:step");
  c_bnd->add_option("--n0", bnd.n0, "per-arm sample size at interim");
  c_bnd->add_option("--p0", bnd.p0, "null response rate");
  c_bnd->add_option("--tau0", bnd.tau0, "futility margin");
  c_bnd->add_option("--s0", bnd.s0, "futility confidence level");
  c_bnd->add_option("--alpha", bnd.alpha, "one-sided alpha");
  c_bnd->add_option("--out", bnd.out_file, "CSV output file");

  PposArgs pp;
  auto* c_pp = app.add_subcommand("ppos", "PPoS curve and event re-estimation");
  c_pp->add_option("--m1", pp.m1, "interim OS events")->required();
  c_pp->add_option("--loghr", pp.loghr, "interim log hazard ratio")->required();
  c_pp->add_option("--mu", pp.mu, "prior mean of the log HR");
  c_pp->add_option("--sigma", pp.sigma, "prior precision (pseudo-events)");
  c_pp->add_option("--alpha", pp.alpha, "one-sided alpha");
  c_pp->add_option("--power", pp.power, "PPoS target");
  c_pp->add_option("--m2-planned", pp.m2_planned, "planned post-interim events");
  c_pp->add_option("--m2-max", pp.m2_max, "event ceiling");
  c_pp->add_option("--m2-range", pp.m2_range, "table range lo:hi[:step]");
  c_pp->add_option("--out", pp.out_file, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (c_sim->parsed()) {
      if (sim.config.empty() && sim.verify_manifest.empty()) {
        throw sddo::config_error("simulate needs --config or --verify");
      }
      return run_simulate(sim);
    }
    if (c_cal->parsed()) return run_calibrate(cal);
    if (c_bnd->parsed()) return run_bounds(bnd);
    if (c_pp->parsed()) return run_ppos(pp);
  } catch (const sddo::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sddo::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
