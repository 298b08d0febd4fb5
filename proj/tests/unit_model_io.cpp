// SPDX-License-Identifier: Apache-2.0
//
// Model text formats: golden-file stability, export/import round trips
// preserving optimal values, structural binary markers, name sanitization,
// and line-numbered rejection of malformed input.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/lp.hpp"
#include "gridnk/mip.hpp"
#include "gridnk/model_io.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/singlelevel.hpp"
#include "support.hpp"

using namespace gridnk;
using namespace testsupport;

namespace {

LinearProgram one_var() {
  LinearProgram lp;
  lp.sense = LinearProgram::Sense::maximize;
  lp.obj_constant = 1.0;
  const int x = lp.add_var("x", 0.5, 4.0, 2.5);
  lp.add_row({"c", -kInf, 5.0, {{x, 1.5}}});
  return lp;
}

double lp_optimum(const LinearProgram& lp) {
  LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpSolution::Status::optimal);
  return s.objective;
}

void check_lp_round_trip(const LinearProgram& lp) {
  const double want = lp_optimum(lp);
  for (ModelFormat fmt : {ModelFormat::mps, ModelFormat::lp_text}) {
    const MipProblem back = import_model(export_model(lp, fmt), fmt);
    CHECK(back.binaries.empty());
    const double got = lp_optimum(back.lp);
    INFO((fmt == ModelFormat::mps ? "mps" : "lp_text"));
    CHECK(std::fabs(got - want) <= 1e-9 * (1.0 + std::fabs(want)));
  }
}

void check_milp_round_trip(const MipProblem& m) {
  MipSolution orig = solve_milp(m);
  REQUIRE(orig.has_incumbent);
  for (ModelFormat fmt : {ModelFormat::mps, ModelFormat::lp_text}) {
    const MipProblem back = import_model(export_model(m, fmt), fmt);
    CHECK(back.binaries.size() == m.binaries.size());
    MipSolution got = solve_milp(back);
    REQUIRE(got.has_incumbent);
    INFO((fmt == ModelFormat::mps ? "mps" : "lp_text"));
    CHECK(std::fabs(got.objective - orig.objective) <=
          1e-9 * (1.0 + std::fabs(orig.objective)));
  }
}

}  // namespace

TEST_CASE("one-variable program matches the golden file byte for byte") {
  const std::string got = export_model(one_var(), ModelFormat::mps, "one_var");
  CHECK(got == read_file(source_path("tests/golden/one_var.mps")));
}

TEST_CASE("golden program round trips with its optimum intact") {
  // max 2.5 x + 1 with 1.5 x <= 5, x in [0.5, 4]: x = 10/3, value 28/3.
  const LinearProgram lp = one_var();
  CHECK(lp_optimum(lp) == Catch::Approx(28.0 / 3.0).margin(1e-9));
  check_lp_round_trip(lp);
}

TEST_CASE("dual programs round trip through both formats") {
  Rng rng(5117u);
  for (int t = 0; t < 4; ++t) {
    const Network net = random_network(rng);
    const Scenario sc = random_scenario(rng, net, "s1");
    InterdictionPlan plan;
    if (t % 2 == 1 && !net.lines.empty())
      plan.attacked_lines.push_back(net.lines[0].id);
    check_lp_round_trip(build_dual_lp(net, sc, plan).lp);
  }
}

TEST_CASE("attack selection MILP round trips through both formats") {
  const Network net = t3();
  ScenarioSet ss;
  ss.scenarios.push_back({"s1", {}, {}, 0.5});
  ss.scenarios.push_back({"s2", {"l23"}, {}, 0.5});
  check_milp_round_trip(build_single_level_milp(net, ss, 1).mip);
}

TEST_CASE("binary columns are marked in both formats") {
  const Network net = t3();
  ScenarioSet ss;
  ss.scenarios.push_back({"s1", {}, {}, 1.0});
  const MipProblem m = build_single_level_milp(net, ss, 1).mip;

  const std::string mps = export_model(m, ModelFormat::mps);
  CHECK(mps.find("'INTORG'") != std::string::npos);
  CHECK(mps.find("'INTEND'") != std::string::npos);
  CHECK(mps.find(" BV BND") != std::string::npos);
  CHECK(mps.find("x_l12") != std::string::npos);     // sanitized "x:l12"
  CHECK(mps.find("pi_b1_s1") != std::string::npos);  // sanitized "pi:b1@s1"
  CHECK(mps.find(':') == std::string::npos);
  CHECK(mps.find('@') == std::string::npos);

  const std::string lpt = export_model(m, ModelFormat::lp_text);
  CHECK(lpt.substr(0, 9) == "Maximize\n");
  CHECK(lpt.find("\nBinary\n") != std::string::npos);
  const std::size_t bin_at = lpt.find("\nBinary\n");
  CHECK(lpt.find(" x_l12\n", bin_at) != std::string::npos);
  CHECK(lpt.find(" y_g1\n", bin_at) != std::string::npos);
}

TEST_CASE("ranged rows survive both formats") {
  LinearProgram lp;
  lp.sense = LinearProgram::Sense::minimize;
  const int x = lp.add_var("x", 0.0, 10.0, 1.0);
  const int y = lp.add_var("y", 0.0, 10.0, 2.0);
  lp.add_row({"band", 2.0, 8.0, {{x, 1.0}, {y, 1.0}}});
  CHECK(lp_optimum(lp) == Catch::Approx(2.0).margin(1e-12));

  const std::string mps = export_model(lp, ModelFormat::mps);
  CHECK(mps.find("RANGES") != std::string::npos);
  const std::string lpt = export_model(lp, ModelFormat::lp_text);
  CHECK(lpt.find(" band_lo:") != std::string::npos);
  CHECK(lpt.find(" band_hi:") != std::string::npos);
  check_lp_round_trip(lp);
}

TEST_CASE("free fixed and negative bounds survive both formats") {
  LinearProgram lp;
  lp.sense = LinearProgram::Sense::maximize;
  const int x = lp.add_var("x", -kInf, kInf, -1.0);
  const int y = lp.add_var("y", -3.0, -1.0, 1.0);
  const int z = lp.add_var("z", 1.5, 1.5, 2.0);
  lp.add_row({"floor", 2.0, kInf, {{x, 1.0}}});
  lp.add_row({"tie", 0.0, 0.0, {{y, 1.0}, {z, 1.0}, {x, -0.25}}});
  check_lp_round_trip(lp);
  const std::string mps = export_model(lp, ModelFormat::mps);
  CHECK(mps.find(" MI BND") != std::string::npos);
  CHECK(mps.find(" FX BND") != std::string::npos);
  const std::string lpt = export_model(lp, ModelFormat::lp_text);
  CHECK(lpt.find(" x free\n") != std::string::npos);
  CHECK(lpt.find(" z = 1.5\n") != std::string::npos);
}

TEST_CASE("colliding sanitized names are rejected") {
  LinearProgram lp;
  lp.add_var("a:1", 0.0, 1.0, 1.0);
  lp.add_var("a(1", 0.0, 1.0, 1.0);
  CHECK_THROWS_MATCHES(
      export_model(lp, ModelFormat::mps), ConfigError,
      Catch::Matchers::MessageMatches(
          Catch::Matchers::ContainsSubstring("sanitize")));

  LinearProgram rows;
  const int x = rows.add_var("x", 0.0, 1.0, 1.0);
  rows.add_row({"r.1", -kInf, 1.0, {{x, 1.0}}});
  rows.add_row({"r@1", -kInf, 2.0, {{x, 1.0}}});
  CHECK_THROWS_AS(export_model(rows, ModelFormat::lp_text), ConfigError);

  // A ranged row whose split name collides with an existing row.
  LinearProgram split;
  const int w = split.add_var("w", 0.0, 5.0, 1.0);
  split.add_row({"band", 1.0, 2.0, {{w, 1.0}}});
  split.add_row({"band_hi", -kInf, 3.0, {{w, 1.0}}});
  CHECK_THROWS_AS(export_model(split, ModelFormat::lp_text), ConfigError);
  CHECK_NOTHROW(export_model(split, ModelFormat::mps));  // native ranges
}

TEST_CASE("names longer than the limit are truncated") {
  LinearProgram lp;
  const std::string big(80, 'a');
  lp.add_var(big + "1", 0.0, 1.0, 1.0);
  const std::string text = export_model(lp, ModelFormat::mps);
  CHECK(text.find(std::string(64, 'a')) != std::string::npos);
  CHECK(text.find(std::string(65, 'a')) == std::string::npos);
  // Two long names identical within the first 64 characters collide.
  lp.add_var(big + "2", 0.0, 1.0, 1.0);
  CHECK_THROWS_AS(export_model(lp, ModelFormat::mps), ConfigError);
}

TEST_CASE("malformed text is rejected with line numbers") {
  using Catch::Matchers::ContainsSubstring;
  using Catch::Matchers::MessageMatches;

  const std::string good = export_model(one_var(), ModelFormat::mps);
  // Unknown section header.
  CHECK_THROWS_MATCHES(import_model("JUNK\n" + good, ModelFormat::mps),
                       ConfigError, MessageMatches(ContainsSubstring("line 1")));
  // Bad numeric field inside COLUMNS (line 8 of the golden layout).
  std::string bad = good;
  bad.replace(bad.find("2.5"), 3, "2.x5");
  CHECK_THROWS_MATCHES(import_model(bad, ModelFormat::mps), ConfigError,
                       MessageMatches(ContainsSubstring("line 8")));
  // Reference to an undeclared row.
  std::string ghost = good;
  ghost.replace(ghost.find("    x             c  "),
                std::string("    x             c  ").size(),
                "    x             d  ");
  CHECK_THROWS_MATCHES(import_model(ghost, ModelFormat::mps), ConfigError,
                       MessageMatches(ContainsSubstring("unknown row")));
  // Truncated file.
  const std::string cut = good.substr(0, good.find("ENDATA"));
  CHECK_THROWS_MATCHES(import_model(cut, ModelFormat::mps), ConfigError,
                       MessageMatches(ContainsSubstring("ENDATA")));

  const std::string lpt = export_model(one_var(), ModelFormat::lp_text);
  std::string norel = lpt;
  norel.replace(norel.find("<="), 2, "??");
  CHECK_THROWS_MATCHES(import_model(norel, ModelFormat::lp_text), ConfigError,
                       MessageMatches(ContainsSubstring("line")));
  const std::string noend = lpt.substr(0, lpt.find("End"));
  CHECK_THROWS_MATCHES(import_model(noend, ModelFormat::lp_text), ConfigError,
                       MessageMatches(ContainsSubstring("End")));
}
