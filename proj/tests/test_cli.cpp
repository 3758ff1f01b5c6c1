#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "magblock/observables.hpp"
#include "magblock/output.hpp"
#include "oracles.hpp"

using namespace magblock;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("magblock_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args) {
  const fs::path err_file = fs::temp_directory_path() / "magblock_cli_stderr.txt";
  const std::string cmd =
      std::string(MAGBLOCK_CLI_PATH) + " " + args + " 2>" + err_file.string();
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = slurp(err_file);
  return r;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("help lists the exit codes") {
  const RunResult r = run("--help");
  CHECK(r.code == 0);
  CHECK(r.out.find("Exit codes:") != std::string::npos);
  CHECK(r.out.find("2  steady state carries no magnon excitation") != std::string::npos);
  CHECK(r.out.find("MAGBLOCK_MAX_WORKERS") != std::string::npos);
  CHECK(run("").code == 1);
  CHECK(run("bogus").code == 1);
}

TEST_CASE("g2 at the working point") {
  const RunResult r = run("g2");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const double g2 = j.at("g2").get<double>();
  CHECK(g2 < 1e-2);
  CHECK(j.at("classification").at("statistics") == "antibunching");
  CHECK(j.at("classification").at("blockade") == true);
  CHECK(j.contains("mean_number"));
  CHECK(j.at("solver").at("residual").get<double>() < 1e-10);

  // Independent relaxation of the master equation at the reported cutoff.
  SystemParams p = SystemParams::paper_defaults();
  p.n_max = j.at("cutoff_used").get<int>();
  const auto relaxed = oracle::relax_rk4(p, oracle::vacuum(p.dims()), 0.01, 1e-13, 400.0);
  CHECK(std::abs(g2 / oracle::g2_from_matrix(p.dims(), relaxed.rho) - 1.0) < 1e-6);
}

TEST_CASE("g2 exit codes and classification") {
  const RunResult dark = run("g2 --param omega_drive=0 --param xi_probe=0");
  CHECK(dark.code == 2);
  CHECK(dark.err.find("steady state carries no magnon excitation") != std::string::npos);

  const RunResult bunched = run("g2 --param delta=14.8");
  REQUIRE(bunched.code == 0);
  CHECK(json::parse(bunched.out).at("classification").at("statistics") == "bunching");

  const RunResult fixed = run("g2 --cutoff 6");
  REQUIRE(fixed.code == 0);
  CHECK(json::parse(fixed.out).at("cutoff_used") == 6);
  CHECK(run("g2 --cutoff six").code == 1);
  CHECK(run("g2 --param kappa_m=-1").code == 1);
  CHECK(run("g2 --param nonsense=1").code == 1);
}

TEST_CASE("g2 writes its record and honours config precedence") {
  const fs::path dir = scratch("g2");
  const fs::path cfg = write_file(dir, "c.json", R"({"system": {"delta": 14.8, "n_max": 6}, "cutoff": 6})");
  const RunResult from_file = run("g2 --config " + cfg.string() + " --out " + dir.string());
  REQUIRE(from_file.code == 0);
  const json rec = json::parse(slurp(dir / "g2.json"));
  CHECK(rec.at("params").at("delta_q") == 14.8);
  CHECK(rec.at("cutoff_used") == 6);

  const RunResult cli_wins = run("g2 --config " + cfg.string() + " --param delta=21");
  REQUIRE(cli_wins.code == 0);
  CHECK(json::parse(cli_wins.out).at("params").at("delta_q") == 21.0);
  fs::remove_all(dir);
}

TEST_CASE("malformed config exits 1 with its line") {
  const fs::path dir = scratch("badcfg");
  const fs::path cfg =
      write_file(dir, "bad.json", "{\n  \"system\": {\n    \"delta\": 21,\n    \"gq\": 3\n  }\n}\n");
  const RunResult r = run("g2 --config " + cfg.string());
  CHECK(r.code == 1);
  CHECK(r.err.find("line 4") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("spectrum") {
  const RunResult r = run("spectrum --param g_qm=21");
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::map<int, double> splittings;
  bool in_splittings = false;
  while (std::getline(lines, line)) {
    if (line.rfind("# excitations splitting", 0) == 0) {
      in_splittings = true;
      continue;
    }
    if (in_splittings) {
      std::istringstream f(line);
      int n;
      double s;
      f >> n >> s;
      splittings[n] = s;
    }
  }
  REQUIRE(splittings.size() == 2);
  CHECK(0.5 * splittings[2] == doctest::Approx(29.698484809834994).epsilon(1e-10));
  CHECK(splittings[1] == doctest::Approx(42.0));

  const RunResult bare = run("spectrum --param g_qm=0");
  REQUIRE(bare.code == 0);
  const std::string tail = bare.out.substr(bare.out.find("# excitations splitting"));
  std::istringstream rows(tail.substr(tail.find('\n') + 1));
  int n;
  double s;
  while (rows >> n >> s) CHECK(std::abs(s) < 1e-12);

  CHECK(run("spectrum --param omega_drive=0.1").code == 1);
}

TEST_CASE("nth") {
  const RunResult r = run("nth --omega-ghz 8.5 --temperature-mk 20");
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.out) == doctest::Approx(1.3860843763692788e-09).epsilon(1e-12));
  CHECK(std::stod(run("nth --omega-ghz 8.5 --temperature-mk 45").out) ==
        doctest::Approx(1.2e-4).epsilon(0.05));
  CHECK(std::stod(run("nth --omega-ghz 8.5 --temperature-mk 60").out) ==
        doctest::Approx(1.1e-3).epsilon(0.05));
  CHECK(std::stod(run("nth --omega-ghz 8.5 --temperature-mk 100").out) ==
        doctest::Approx(1.7e-2).epsilon(0.05));
  CHECK(run("nth --omega-ghz 0 --temperature-mk 20").code == 1);
  CHECK(run("nth --omega-ghz 8.5 --temperature-mk -3").code == 1);
}

TEST_CASE("figure fig5 writes curves, inset and a plot script") {
  const fs::path dir = scratch("fig5");
  const RunResult r = run("figure fig5 --plot-script --out " + dir.string());
  REQUIRE(r.code == 0);
  for (const char* stem : {"fig5_nth_0", "fig5_nth_0.0001", "fig5_nth_0.001", "fig5_inset_inset"}) {
    CHECK(fs::exists(dir / (std::string(stem) + ".csv")));
    CHECK(fs::exists(dir / (std::string(stem) + ".provenance.json")));
  }
  CHECK(fs::exists(dir / "fig5.gp"));
  CHECK(fs::exists(dir / "fig5_inset.gp"));

  std::ifstream cold_in(dir / "fig5_nth_0.csv"), warm_in(dir / "fig5_nth_0.001.csv");
  const CsvTable cold = read_csv(cold_in), warm = read_csv(warm_in);
  CHECK(cold.header[0] == "g_qm_over_gamma");
  REQUIRE(cold.rows.size() == 121);
  REQUIRE(warm.rows.size() == 121);
  // Thermal noise lifts g2 wherever the cold system is antibunched. Near the
  // two-magnon resonance g = sqrt(2) delta the cold curve is strongly bunched and
  // thermal mixing pulls it back towards 2, so the ordering flips there.
  bool below = true;
  int antibunched = 0;
  for (std::size_t i = 0; i < cold.rows.size(); ++i) {
    REQUIRE(cold.rows[i][4] == "ok");
    REQUIRE(warm.rows[i][4] == "ok");
    const double c = std::stod(cold.rows[i][1]), w = std::stod(warm.rows[i][1]);
    if (c < 1.0) {
      ++antibunched;
      below = below && c < w;
    }
  }
  CHECK(below);
  CHECK(antibunched > 90);
  CHECK(std::stod(cold.rows.back()[1]) > std::stod(warm.rows.back()[1]));
  fs::remove_all(dir);
}

TEST_CASE("figure maps: shape and byte stability") {
  const fs::path dir = scratch("maps");
  const fs::path ranges2 = write_file(dir, "r2.json", R"({"axes": [
    {"param": "delta", "min": -25, "max": 25, "count": 5},
    {"param": "g_qm", "min": 5, "max": 25, "count": 4}]})");
  REQUIRE(run("figure fig2a --config " + ranges2.string() + " --out " + (dir / "a").string()).code == 0);
  std::ifstream map_in(dir / "a" / "fig2a_map.csv");
  const CsvTable map = read_csv(map_in);
  CHECK(map.rows.size() == 20);
  CHECK(map.header[0] == "delta_over_gamma");
  CHECK(map.header[1] == "g_qm_over_gamma");

  const fs::path ranges3 = write_file(dir, "r3.json", R"({"axes": [
    {"param": "omega_drive", "min": 0.05, "max": 5, "count": 3, "spacing": "log"},
    {"param": "xi_probe", "min": 1e-3, "max": 0.1, "count": 3, "spacing": "log"}]})");
  for (const char* sub : {"b1", "b2"}) {
    REQUIRE(run("figure fig2b --config " + ranges3.string() + " --out " + (dir / sub).string()).code == 0);
  }
  CHECK(slurp(dir / "b1" / "fig2b_map.csv") == slurp(dir / "b2" / "fig2b_map.csv"));

  REQUIRE(run("figure fig2b --format ndjson --config " + ranges3.string() + " --out " +
              (dir / "nd").string()).code == 0);
  std::ifstream nd(dir / "nd" / "fig2b_map.ndjson");
  std::string line;
  int rows = 0;
  while (std::getline(nd, line)) {
    CHECK(json::parse(line).contains("xi_over_gamma"));
    ++rows;
  }
  CHECK(rows == 9);
  CHECK(run("figure fig9 --out " + dir.string()).code == 1);
  fs::remove_all(dir);
}

TEST_CASE("sweep output regenerates from its sidecar") {
  const fs::path dir = scratch("sweep");
  const fs::path cfg = write_file(dir, "scan.json", R"({
  "system": {"omega_drive": 0},
  "axes": [{"param": "xi_probe", "min": 0, "max": 0.02, "count": 3}],
  "cutoff": 5
})");
  REQUIRE(run("sweep --config " + cfg.string() + " --out " + (dir / "first").string()).code == 0);
  const fs::path sidecar = dir / "first" / "scan.provenance.json";
  REQUIRE(fs::exists(sidecar));
  std::ifstream in(dir / "first" / "scan.csv");
  const CsvTable t = read_csv(in);
  CHECK(t.rows[0][4] == "no-excitation");
  CHECK(t.rows[0][1].empty());

  fs::copy_file(sidecar, dir / "scan.json", fs::copy_options::overwrite_existing);
  REQUIRE(run("sweep --config " + (dir / "scan.json").string() + " --out " + (dir / "second").string()).code == 0);
  CHECK(slurp(dir / "first" / "scan.csv") == slurp(dir / "second" / "scan.csv"));
  CHECK(run("sweep").code == 1);
  fs::remove_all(dir);
}

TEST_CASE("trajectory subcommand") {
  const fs::path dir = scratch("traj");
  const fs::path cfg = write_file(dir, "t.json", R"({
  "system": {"xi_probe": 0.3},
  "cutoff": 6,
  "trajectory": {"n_trajectories": 40, "t_sample": 40, "bootstrap_resamples": 200}
})");
  const RunResult r = run("trajectory --compare --seed 7 --config " + cfg.string());
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("cutoff_used") == 6);
  CHECK(j.at("trajectory").at("seed") == 7);
  CHECK(j.contains("deterministic_g2"));
  CHECK(j.contains("jump_counts"));
  CHECK(run("trajectory --compare --seed 7 --config " + cfg.string()).out == r.out);
  fs::remove_all(dir);
}
