#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("subscat_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "run.ini";
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(SUBSCAT_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// Data rows of a CSV artifact, split into fields.
std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::vector<std::vector<std::string>> out;
  std::ifstream in(p);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    out.push_back(f);
  }
  return out;
}

const std::string kRect =
    "[barrier]\nkind = rectangular\na = 0\nb = 1\nheight = 2\n"
    "[packet]\nx0 = -30\nsigma = 5\nk0 = 1.5\nk_points = 512\n"
    "[run]\nk_min = 0.5\nk_max = 1.5\nk_count = 3\ntimes = 0, 40\n";

}  // namespace

TEST_CASE("solve writes the amplitude table") {
  const fs::path dir = scratch("solve");
  const fs::path cfg = write(dir, kRect);
  REQUIRE(run("solve --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 0);
  const auto r = rows(dir / "solve.csv");
  REQUIRE(r.size() == 3);
  CHECK(std::stod(r[1][0]) == 1.0);
  CHECK(std::stod(r[1][5]) == doctest::Approx(oracle_ref::rect_transmission(2.0, 1.0, 1.0)).epsilon(1e-12));
  const std::string csv = slurp(dir / "solve.csv");
  CHECK(csv.find("# config_hash") != std::string::npos);
  CHECK(csv.find("hbar = m = 1") != std::string::npos);
}

TEST_CASE("free particle through solve, decompose and times") {
  const fs::path dir = scratch("free");
  const fs::path cfg = write(dir,
                             "[barrier]\nkind = rectangular\na = 0\nb = 1\nheight = 0\n"
                             "[packet]\nx0 = -60\nsigma = 10\nk0 = 1.5\nk_points = 512\n"
                             "[run]\nk_min = 0.5\nk_max = 2.5\nk_count = 5\n");
  REQUIRE(run("solve --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 0);
  for (const auto& row : rows(dir / "solve.csv")) CHECK(std::stod(row[5]) == doctest::Approx(1.0).epsilon(1e-14));
  REQUIRE(run("decompose --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 0);
  for (const auto& row : rows(dir / "decompose.csv")) {
    CHECK(std::stod(row[3]) == 0.0);
    CHECK(std::stod(row[4]) == 0.0);
    CHECK(row.back() == "degenerate");
  }
  REQUIRE(run("times --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "times.json"));
  CHECK(j["tau_L_tr"]["routeA"].get<double>() == doctest::Approx(1.0 / 1.5).epsilon(1e-2));
  CHECK(j["metadata"]["units"].get<std::string>().find("hbar") != std::string::npos);
}

TEST_CASE("decompose flags the resonance") {
  const fs::path dir = scratch("resonance");
  const double k = std::sqrt(M_PI * M_PI + 2.0);
  std::ostringstream text;
  text.precision(17);
  text << "[barrier]\nkind = rectangular\na = 0\nb = 1\nheight = 1\n[run]\nk_min = " << k << "\nk_max = " << k
       << "\nk_count = 1\n";
  const fs::path cfg = write(dir, text.str());
  REQUIRE(run("decompose --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 0);
  const auto r = rows(dir / "decompose.csv");
  REQUIRE(r.size() == 1);
  CHECK(r[0].back() == "degenerate");
}

TEST_CASE("evolve writes ordered snapshots") {
  const fs::path dir = scratch("evolve");
  const fs::path cfg = write(dir, kRect);
  REQUIRE(run("evolve --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 0);
  CHECK(fs::exists(dir / "snapshot_0000.csv"));
  CHECK(fs::exists(dir / "snapshot_0001.csv"));
  const auto j = nlohmann::json::parse(slurp(dir / "evolve.json"));
  REQUIRE(j["snapshots"].size() == 2);
  CHECK(j["snapshots"][0]["t"].get<double>() < j["snapshots"][1]["t"].get<double>());
  for (const auto& s : j["snapshots"]) CHECK(s["norm_full"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  const auto r = rows(dir / "snapshot_0001.csv");
  REQUIRE(!r.empty());
  CHECK(r.front().size() == 10);
}

TEST_CASE("identical configs give byte-identical JSON") {
  const fs::path one = scratch("det1"), two = scratch("det2");
  const fs::path cfg = write(one, kRect);
  REQUIRE(run("times --workers 1 --config " + cfg.string() + " --out " + one.string(), one / "log") == 0);
  REQUIRE(run("times --workers 3 --config " + cfg.string() + " --out " + two.string(), two / "log") == 0);
  CHECK(slurp(one / "times.json") == slurp(two / "times.json"));
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  fs::path cfg = write(dir, "[barrier]\nkind = symmetric\na = 0\nhalf_profile = -0.5 1\n[run]\nk_min = 1\nk_max = 2\nk_count = 2\n");
  CHECK(run("solve --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 2);
  CHECK(slurp(dir / "log").find("half_profile") != std::string::npos);

  cfg = write(dir, kRect + "omega_ladder = 1e-3\n");
  CHECK(run("larmor --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 2);
  CHECK(slurp(dir / "log").find("omega_ladder") != std::string::npos);

  // Packet overlapping the barrier.
  cfg = write(dir, "[barrier]\nkind = rectangular\na = 0\nb = 1\nheight = 2\n[packet]\nx0 = -1\nsigma = 5\nk0 = 1.5\n"
                   "[run]\ntimes = 0\n");
  CHECK(run("evolve --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 2);

  // A ladder far outside the perturbative regime does not converge.
  cfg = write(dir, kRect + "omega_ladder = 1.5, 1.2\n");
  CHECK(run("larmor --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 3);

  CHECK(run("solve --config " + (dir / "missing.ini").string(), dir / "log") != 0);
  CHECK(run("bogus", dir / "log") != 0);
}

TEST_CASE("negative heights are flagged in the metadata") {
  const fs::path dir = scratch("wells");
  const fs::path cfg = write(dir, "[barrier]\nkind = rectangular\na = 0\nb = 1\nheight = -1\n[run]\nk_min = 1\nk_max = 1\nk_count = 1\n");
  REQUIRE(run("solve --config " + cfg.string() + " --out " + dir.string(), dir / "log") == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "solve.json"));
  CHECK(j["metadata"]["warnings"].size() == 1);
}
