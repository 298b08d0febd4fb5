// SPDX-License-Identifier: Apache-2.0
//
// Tests for the per-scenario load-shed LP. The 3-bus triangle values are
// worked out by hand from the DC flow-split rule (direct line carries 2/3 of
// the injection, the two-hop path 1/3) and frozen here as oracles.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "gridnk/common.hpp"
#include "gridnk/loadshed.hpp"
#include "gridnk/network.hpp"
#include "gridnk/scenario.hpp"
#include "support.hpp"

using Catch::Approx;
using namespace gridnk;
using testsupport::random_network;
using testsupport::random_scenario;
using testsupport::t3;

namespace {

const Scenario kNoOutage{"all_on", {}, {}, 1.0};

InterdictionPlan lines_plan(std::vector<std::string> lines) {
  InterdictionPlan p;
  p.attacked_lines = std::move(lines);
  return p;
}

InterdictionPlan gens_plan(std::vector<std::string> gens) {
  InterdictionPlan p;
  p.attacked_gens = std::move(gens);
  return p;
}

}  // namespace

TEST_CASE("load-shed LP has the expected shape", "[inner]") {
  Network net = t3();
  LinearProgram lp = build_inner_lp(net, kNoOutage, {});
  int shed = 0, gen = 0, flow = 0, ang = 0;
  for (const std::string& name : lp.var_name) {
    if (name.rfind("shed:", 0) == 0) ++shed;
    if (name.rfind("gen:", 0) == 0) ++gen;
    if (name.rfind("flow:", 0) == 0) ++flow;
    if (name.rfind("ang:", 0) == 0) ++ang;
  }
  CHECK(shed == 3);
  CHECK(gen == 1);
  CHECK(flow == 3);
  CHECK(ang == 3);
  CHECK(lp.num_rows() == 9);  // 3 balance + 2x3 Ohm, no angle-diff limits
}

TEST_CASE("triangle with no attack sheds the flow-split remainder", "[inner]") {
  Network net = t3();
  DispatchSolution d = solve_inner(net, kNoOutage, {});
  CHECK(d.shed_total_mw == Approx(10.0).margin(1e-5));
  CHECK(d.shed_frac.at("b3") == Approx(0.1).margin(1e-7));
  CHECK(d.gen_mw.at("g1") == Approx(90.0).margin(1e-5));
  // Direct line saturates at its 60 MW limit; each path leg carries half.
  CHECK(std::fabs(d.flow_mw.at("l13")) == Approx(60.0).margin(1e-5));
  CHECK(std::fabs(d.flow_mw.at("l12")) == Approx(30.0).margin(1e-5));
  CHECK(std::fabs(d.flow_mw.at("l23")) == Approx(30.0).margin(1e-5));
}

TEST_CASE("each single-line attack on the triangle sheds 40 MW", "[inner]") {
  Network net = t3();
  for (const std::string& line : {"l12", "l13", "l23"}) {
    DispatchSolution d = solve_inner(net, kNoOutage, lines_plan({line}));
    INFO("attacked " << line);
    CHECK(d.shed_total_mw == Approx(40.0).margin(1e-5));
    CHECK(d.flow_mw.at(line) == 0.0);  // off line carries exactly nothing
  }
}

TEST_CASE("attacking the only generator sheds everything", "[inner]") {
  Network net = t3();
  DispatchSolution d = solve_inner(net, kNoOutage, gens_plan({"g1"}));
  CHECK(d.shed_total_mw == Approx(100.0).margin(1e-6));
  CHECK(d.gen_mw.at("g1") == 0.0);
  CHECK(d.shed_frac.at("b3") == Approx(1.0).margin(1e-9));
}

TEST_CASE("islanding the demand bus sheds everything", "[inner]") {
  Network net = t3();
  // Removing l12 and l13 isolates the generator at b1; the b2-b3 island
  // keeps its (demandless) line but has no supply.
  DispatchSolution d = solve_inner(net, kNoOutage, lines_plan({"l12", "l13"}));
  CHECK(d.shed_total_mw == Approx(100.0).margin(1e-6));
}

TEST_CASE("attack and outage of the same line are idempotent", "[inner]") {
  Network net = t3();
  const Scenario st_off{"line_out", {"l12"}, {}, 1.0};
  const double both =
      solve_inner(net, st_off, lines_plan({"l12"})).shed_total_mw;
  const double attack_only =
      solve_inner(net, kNoOutage, lines_plan({"l12"})).shed_total_mw;
  const double outage_only = solve_inner(net, st_off, {}).shed_total_mw;
  CHECK(both == Approx(attack_only).margin(1e-9));
  CHECK(both == Approx(outage_only).margin(1e-9));
  CHECK(both == Approx(40.0).margin(1e-5));
}

TEST_CASE("per-line angle limits restrict deliverable power", "[inner]") {
  Network net = t3();
  net.lines[net.line_index("l13")].angle_diff_max_rad = 0.03;
  net.validate();
  // theta_1 - theta_3 is capped at 0.03 rad, so the parallel system
  // (equivalent susceptance 15 p.u.) delivers at most 0.45 p.u.
  DispatchSolution d = solve_inner(net, kNoOutage, {});
  CHECK(d.shed_total_mw == Approx(55.0).margin(1e-5));
  // With the limited line attacked, the limit relaxes to the global box
  // and the two-hop path works as before.
  DispatchSolution att = solve_inner(net, kNoOutage, lines_plan({"l13"}));
  CHECK(att.shed_total_mw == Approx(40.0).margin(1e-5));
}

TEST_CASE("single-bus edge cases", "[inner]") {
  Network net;
  net.base_mva = 100.0;
  net.angle_bound_rad = 0.5;
  net.buses = {{"b1", 50.0, {}}};
  net.generators = {{"g1", "b1", 60.0}};
  net.validate();
  CHECK(solve_inner(net, kNoOutage, {}).shed_total_mw ==
        Approx(0.0).margin(1e-7));
  CHECK(solve_inner(net, kNoOutage, gens_plan({"g1"})).shed_total_mw ==
        Approx(50.0).margin(1e-7));

  net.buses[0].demand_mw = 0.0;
  net.validate();
  CHECK(solve_inner(net, kNoOutage, {}).shed_total_mw ==
        Approx(0.0).margin(1e-9));
}

TEST_CASE("dispatch invariants hold across random instances", "[inner][property]") {
  Rng rng(90210u);
  for (int trial = 0; trial < 30; ++trial) {
    INFO("trial " << trial);
    Network net = random_network(rng);
    Scenario sc = random_scenario(rng, net, "s1");
    InterdictionPlan plan;
    for (const Line& l : net.lines)
      if (rng.bernoulli(0.1)) plan.attacked_lines.push_back(l.id);
    for (const Generator& g : net.generators)
      if (rng.bernoulli(0.1)) plan.attacked_gens.push_back(g.id);

    const EffectiveStatus st = effective_status(net, sc, plan);
    DispatchSolution d = solve_inner(net, sc, plan);

    CHECK(d.shed_total_mw >= -1e-6);
    CHECK(d.shed_total_mw <= total_demand(net) + 1e-6);

    double shed_sum = 0.0;
    for (const Bus& b : net.buses) {
      const double frac = d.shed_frac.at(b.id);
      CHECK(frac >= 0.0);
      CHECK(frac <= 1.0);
      shed_sum += b.demand_mw * frac;
    }
    CHECK(d.shed_total_mw == Approx(shed_sum).margin(1e-5));

    for (std::size_t g = 0; g < net.generators.size(); ++g) {
      const double mw = d.gen_mw.at(net.generators[g].id);
      if (st.gen_on[g]) {
        CHECK(mw >= 0.0);
        CHECK(mw <= net.generators[g].pmax_mw + 1e-6);
      } else {
        CHECK(mw == 0.0);
      }
      CHECK(d.duals.gen_cap.at(net.generators[g].id) >= 0.0);
    }
    for (std::size_t l = 0; l < net.lines.size(); ++l) {
      const double mw = d.flow_mw.at(net.lines[l].id);
      if (st.line_on[l]) {
        CHECK(std::fabs(mw) <= net.lines[l].thermal_mw + 1e-6);
      } else {
        CHECK(mw == 0.0);
      }
      CHECK(d.duals.ohm_hi.at(net.lines[l].id) >= 0.0);
      CHECK(d.duals.ohm_lo.at(net.lines[l].id) >= 0.0);
    }

    InterdictionPlan all_gens;
    for (const Generator& g : net.generators)
      all_gens.attacked_gens.push_back(g.id);
    CHECK(solve_inner(net, sc, all_gens).shed_total_mw ==
          Approx(total_demand(net)).margin(1e-5));
  }
}

TEST_CASE("expected shed is the weighted scenario average", "[inner]") {
  Network net = t3();
  ScenarioSet single;
  single.scenarios = {{"s1", {}, {}, 1.0}};
  CHECK(expected_shed(net, single, {}) == Approx(10.0).margin(1e-5));

  ScenarioSet twin;
  twin.scenarios = {{"s1", {}, {}, 0.5}, {"s2", {}, {}, 0.5}};
  CHECK(expected_shed(net, twin, {}) == Approx(10.0).margin(1e-5));

  ScenarioSet mixed;
  mixed.scenarios = {{"s1", {}, {"g1"}, 0.25}, {"s2", {}, {}, 0.75}};
  CHECK(expected_shed(net, mixed, {}) == Approx(32.5).margin(1e-5));

  // Thread count must not change the result (deterministic reduction).
  CHECK(expected_shed(net, mixed, {}, 4) ==
        expected_shed(net, mixed, {}, 1));
}

TEST_CASE("k=1 optimum on the triangle found by brute force", "[inner]") {
  Network net = t3();
  ScenarioSet ss;
  ss.scenarios = {{"s1", {}, {}, 0.5}, {"s2", {"l23"}, {}, 0.5}};
  double best = -1.0;
  std::string best_id;
  for (const std::string& line : {"l12", "l13", "l23"}) {
    const double v = expected_shed(net, ss, lines_plan({line}));
    if (v > best) {
      best = v;
      best_id = line;
    }
  }
  const double gen_v = expected_shed(net, ss, gens_plan({"g1"}));
  if (gen_v > best) {
    best = gen_v;
    best_id = "g1";
  }
  CHECK(best_id == "g1");
  CHECK(best == Approx(100.0).margin(1e-5));
}
