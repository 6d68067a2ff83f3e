#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "locsim/config.hpp"
#include "locsim/errors.hpp"
#include "locsim/experiments.hpp"
#include "locsim/output.hpp"

using namespace locsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("locsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string config_path(const char* name) { return std::string(LOCSIM_CONFIG_DIR) + "/" + name; }

const char* kSmallBand = R"(
[geometry]
lengths = 1, 1, 1
gaps = 1, 2, 1
[modulation]
eps_kappa = 0.4
eps_s = 0.2
phase_kappa = 0, 9.8696044010893586, 4.9348022005446793
phase_s = 0, 9.8696044010893586, 4.9348022005446793
[solver]
alpha_count = 21
)";

}  // namespace

TEST_CASE("config: defaults") {
  const auto c = parse_config("");
  CHECK(c.geometry.lengths == std::vector<double>{1.0});
  CHECK(c.material.delta == 1e-4);
  CHECK(c.modulation.omega == 0.034);
  CHECK(c.solver.alpha_count == 101);
  CHECK(c.solver.cells == 20);
  CHECK(c.solver.K == 2);
  CHECK(c.output.formats == std::vector<std::string>{"csv", "svg"});
  CHECK_FALSE(c.time_defect.t0.has_value());
}

TEST_CASE("config: canonical text round-trips") {
  for (const char* name : {"fig2_band.cfg", "fig3_static.cfg", "fig3_modulated.cfg",
                           "fig4_time_defect.cfg", "fig5_evolve.cfg", "fig6_snapshots.cfg",
                           "roots_static.cfg"}) {
    const auto c = load_config(config_path(name));
    const std::string text = to_canonical(c);
    CHECK(to_canonical(parse_config(text)) == text);
  }
  const auto c = parse_config(R"(
[modulation]
kappa_harmonics = 0.1:0.05, 1, 0.1:-0.05
source_harmonics = 0, 1, 0
[solver]
guesses = 0.02:0.001, 0.03
t_end = 12.5
)");
  CHECK(c.modulation.kappa_harmonics[0][0] == cplx(0.1, 0.05));
  CHECK(c.solver.guesses[0] == cplx(0.02, 0.001));
  CHECK(*c.solver.t_end == 12.5);
  const std::string text = to_canonical(c);
  CHECK(to_canonical(parse_config(text)) == text);
}

TEST_CASE("config: strict schema names the offending key") {
  try {
    parse_config("[solver]\nalpha_cnt = 3\n");
    FAIL("unknown key accepted");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("alpha_cnt") != std::string::npos);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config("[nonsense]\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("delta = 1\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[material]\ndelta = 1\ndelta = 2\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[material]\ndelta = abc\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[solver]\ncells = -3\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[output]\nformats = png\n"), ValidationError);
  CHECK_THROWS_AS(parse_config("[space_defect]\neta = 0:2\n"), ValidationError);
}

TEST_CASE("config: builders map sites and wave speeds") {
  const auto c = load_config(config_path("fig5_evolve.cfg"));
  const auto contrast = make_contrast(c);
  const auto sd = make_space_defect(c, contrast);
  CHECK(sd.b(0, 1) == doctest::Approx(4.0));
  const auto td = make_time_defect(c);
  REQUIRE(td.has_value());
  CHECK(td->coefficient(0, 1) == 1.0);
  CHECK(td->t0() == doctest::Approx(184.7996).epsilon(1e-6));
  CHECK_FALSE(make_time_defect(parse_config("")).has_value());
}

TEST_CASE("output: CSV numbers carry 17 significant digits") {
  CHECK(csv_number(0.1) == "1.0000000000000001e-01");
  CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);
  CsvTable t({"a", "b"});
  t.row({"1", "2"});
  CHECK(t.str() == "a,b\n1,2\n");
  CHECK_THROWS(t.row({"1"}));
}

TEST_CASE("output: atomic write leaves no temporary behind") {
  const auto dir = scratch("atomic");
  const auto path = (dir / "sub" / "x.csv").string();
  write_atomic(path, "hello\n");
  write_atomic(path, "again\n");
  CHECK(slurp(path) == "again\n");
  CHECK_FALSE(fs::exists(path + ".tmp"));
}

TEST_CASE("band experiment: shape, gaps and determinism") {
  const auto c = parse_config(kSmallBand);
  const auto r = compute_band(c);
  const auto d1 = scratch("band1"), d2 = scratch("band2");
  write_band(r, c, d1.string());
  write_band(compute_band(c), c, d2.string());
  const auto band = slurp(d1 / "band.csv");
  CHECK(band.rfind("alpha,band_index,re_omega,im_omega\n", 0) == 0);
  CHECK(line_count(band) == 1 + 21 * 3);
  CHECK(band == slurp(d2 / "band.csv"));
  CHECK(slurp(d1 / "gaps.csv") == slurp(d2 / "gaps.csv"));
  CHECK(fs::exists(d1 / "band.svg"));
  const auto gaps = slurp(d1 / "gaps.csv");
  CHECK(gaps.find("frequency,") != std::string::npos);
  CHECK(gaps.find("momentum,") != std::string::npos);

  auto still = c;
  still.modulation.eps_kappa = 0.0;
  still.modulation.eps_s = 0.0;
  const auto d3 = scratch("band3");
  write_gaps(compute_band(still), d3.string());
  CHECK(slurp(d3 / "gaps.csv").find("momentum") == std::string::npos);
}

TEST_CASE("modes experiment: static config writes one row per mode") {
  const auto c = load_config(config_path("fig3_static.cfg"));
  const auto r = compute_modes(c);
  CHECK(r.is_static);
  const auto dir = scratch("modes");
  write_modes(r, c, dir.string());
  const auto text = slurp(dir / "modes.csv");
  CHECK(text.rfind("mode_index,re_omega,im_omega,lambda,d\n", 0) == 0);
  CHECK(line_count(text) == 61);
  CHECK(fs::exists(dir / "dol.svg"));
}

TEST_CASE("roots experiment: dedup, failures as rows and validation") {
  auto c = load_config(config_path("roots_static.cfg"));
  c.solver.guesses = {0.0215, 0.0216, 0.022};
  const auto rows = compute_roots(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].status == "converged");
  CHECK(rows[0].root.real() == doctest::Approx(0.0212132034).epsilon(1e-8));

  const auto dir = scratch("roots");
  write_roots(rows, dir.string());
  CHECK(slurp(dir / "roots.csv")
            .rfind("guess,guess_im,root_re,root_im,residual,iterations,status\n", 0) == 0);

  auto zero = c;
  zero.space_defect.eta = {{0, 1, 0.0}};
  CHECK_THROWS_AS(compute_roots(zero), ValidationError);
  auto wide = c;
  wide.geometry.lengths = {1, 1};
  wide.geometry.gaps = {1, 1};
  CHECK_THROWS_AS(compute_roots(wide), UnsupportedConfiguration);
}

TEST_CASE("CLI: exit codes and outputs") {
  const std::string cli = LOCSIM_CLI_PATH;
  const auto dir = scratch("cli");
  auto run = [&](const std::string& args) {
    const int status = std::system((cli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("roots --config " + config_path("roots_static.cfg") + " --out " + dir.string()) == 0);
  CHECK(fs::exists(dir / "roots.csv"));

  const auto bad = dir / "bad.cfg";
  std::ofstream(bad) << "[geometry]\nlenghts = 1\n";
  CHECK(run("band --config " + bad.string()) == 2);

  // cells = 1 cannot hold a defect in cell 3
  const auto bad_site = dir / "site.cfg";
  std::ofstream(bad_site) << "[space_defect]\neta = 3:1:1\n[solver]\ncells = 1\n";
  CHECK(run("modes --config " + bad_site.string() + " --out " + dir.string()) == 2);

  // a time defect that drives 1/kappa negative is a numerical failure
  const auto singular = dir / "singular.cfg";
  std::ofstream(singular) << "[modulation]\neps_kappa = 0.5\n[time_defect]\nc = 0:1:-2\n"
                             "[solver]\ncells = 3\n";
  CHECK(run("evolve --config " + singular.string() + " --out " + dir.string()) == 3);

  CHECK(run("gaps --config " + std::string(config_path("fig2_band.cfg")) + " --out " +
            (dir / "g").string() + " --threads 1") == 0);
  CHECK(fs::exists(dir / "g" / "gaps.csv"));
  CHECK_FALSE(fs::exists(dir / "g" / "band.csv"));
}
