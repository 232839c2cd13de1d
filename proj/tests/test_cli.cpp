#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(SDDO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kNullCfg =
    std::string(SDDO_CONFIG_DIR) + "/table1_global_null.cfg";

}  // namespace

TEST_CASE("cli: zero replicates is a config error") {
  CHECK(run_cli("simulate --config " + kNullCfg + " --reps 0 --out /tmp/x") == 2);
}

TEST_CASE("cli: missing config file is a config error") {
  CHECK(run_cli("simulate --config /nonexistent.cfg --reps 5 --out /tmp/x") == 2);
}

TEST_CASE("cli: invalid configuration content is a config error") {
  const fs::path dir = fs::temp_directory_path() / "sddo_cli_badcfg";
  fs::create_directories(dir);
  std::ofstream(dir / "bad.cfg")
      << "[design]\ndose_levels = 2, 2, 3\n\n[scenario]\norr = 0.2, 0.2, "
         "0.2, 0.2\nhr_pfs = 1, 1, 1, 1\nhr_os = 1, 1, 1, 1\n";
  CHECK(run_cli("simulate --config " + (dir / "bad.cfg").string() +
                " --reps 5 --out " + (dir / "out").string()) == 2);
}

TEST_CASE("cli: unknown subcommand or flag fails parsing") {
  CHECK(run_cli("frobnicate") != 0);
  CHECK(run_cli("bounds --not-a-flag 3") != 0);
}

TEST_CASE("cli: simulate writes byte-identical outputs on rerun") {
  const fs::path dir = fs::temp_directory_path() / "sddo_cli_sim";
  fs::remove_all(dir);
  const std::string base = "simulate --config " + kNullCfg +
                           " --reps 60 --seed 9 --workers 2 --out ";
  REQUIRE(run_cli(base + (dir / "a").string()) == 0);
  REQUIRE(run_cli(base + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "oc_summary.csv") == slurp(dir / "b" / "oc_summary.csv"));
  CHECK(slurp(dir / "a" / "replicates.csv") == slurp(dir / "b" / "replicates.csv"));
  CHECK_FALSE(slurp(dir / "a" / "oc_summary.csv").empty());

  // the manifest reproduces and verifies
  CHECK(run_cli("simulate --verify " + (dir / "a" / "manifest.json").string()) == 0);

  // a tampered manifest digest is a reproducibility failure
  std::string manifest = slurp(dir / "a" / "manifest.json");
  const auto pos = manifest.find("\"oc_summary_csv\": \"");
  REQUIRE(pos != std::string::npos);
  manifest[pos + 20] = manifest[pos + 20] == '0' ? '1' : '0';
  std::ofstream(dir / "a" / "manifest_bad.json") << manifest;
  CHECK(run_cli("simulate --verify " + (dir / "a" / "manifest_bad.json").string()) == 4);
}

TEST_CASE("cli: bounds emits its table") {
  const fs::path dir = fs::temp_directory_path() / "sddo_cli_bounds";
  fs::create_directories(dir);
  const fs::path out = dir / "bounds.csv";
  REQUIRE(run_cli("bounds --doses 2 --t-grid 0.2:0.8:0.3 --out " + out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("doses,t,alpha3,a2,overall_bound,exceeds_alpha\n", 0) == 0);
  // 2 dose counts x 3 information fractions
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("cli: ppos curve with re-estimation footer") {
  const fs::path dir = fs::temp_directory_path() / "sddo_cli_ppos";
  fs::create_directories(dir);
  const fs::path out = dir / "ppos.csv";
  REQUIRE(run_cli("ppos --m1 68 --loghr -0.356675 --m2-range 226:230 --out " +
                  out.string()) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("m2_tilde,ppos\n", 0) == 0);
  CHECK(csv.find("226,0.68673") != std::string::npos);
  CHECK(csv.find("adjusted_m2=") != std::string::npos);
}

TEST_CASE("cli: calibrate runs on a config without tau values") {
  const fs::path dir = fs::temp_directory_path() / "sddo_cli_cal";
  fs::create_directories(dir);
  const std::string cfg = std::string(SDDO_CONFIG_DIR) + "/calibration_base.cfg";
  REQUIRE(run_cli("calibrate --config " + cfg +
                  " --sims 400 --seed 4 --out " + dir.string()) == 0);
  const std::string json = slurp(dir / "calibration.json");
  CHECK(json.find("\"tau0\"") != std::string::npos);
  CHECK(json.find("\"tau1\"") != std::string::npos);
}
