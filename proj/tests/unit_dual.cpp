// SPDX-License-Identifier: Apache-2.0
//
// Dual load-shed LP: strong duality against the primal solver, structural
// counts, availability handling, and the dual-variable bound policies.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/loadshed.hpp"
#include "gridnk/lp.hpp"
#include "gridnk/network.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/singlelevel.hpp"
#include "support.hpp"

using namespace gridnk;
using namespace testsupport;

namespace {

double dual_optimum(const Network& net, const Scenario& sc,
                    const InterdictionPlan& plan) {
  DualModel m = build_dual_lp(net, sc, plan);
  LpSolution sol = solve_lp(m.lp);
  REQUIRE(sol.status == LpSolution::Status::optimal);
  return sol.objective;
}

Scenario all_on(const std::string& id = "s1") { return Scenario{id, {}, {}, 1.0}; }

}  // namespace

TEST_CASE("dual optimum equals the primal shed on the triangle") {
  const Network net = t3();
  const Scenario sc = all_on();
  CHECK(dual_optimum(net, sc, {}) == Catch::Approx(10.0).margin(1e-6));
  CHECK(dual_optimum(net, sc, {{"l23"}, {}}) ==
        Catch::Approx(40.0).margin(1e-6));
  CHECK(dual_optimum(net, sc, {{}, {"g1"}}) ==
        Catch::Approx(100.0).margin(1e-6));
}

TEST_CASE("scenario outage and attack produce the same dual optimum") {
  const Network net = t3();
  Scenario sc = all_on();
  sc.off_lines.push_back("l23");
  const double via_scenario = dual_optimum(net, sc, {});
  const double via_attack = dual_optimum(net, all_on(), {{"l23"}, {}});
  CHECK(via_scenario == Catch::Approx(via_attack).margin(1e-9));
  CHECK(via_scenario == Catch::Approx(40.0).margin(1e-6));
}

TEST_CASE("row count is lines plus two buses plus generators") {
  const Network net = t3();
  DualModel m = build_dual_lp(net, all_on(), {});
  const int nb = 3, ng = 1, nl = 3;
  CHECK(m.lp.num_rows() == nl + 2 * nb + ng);
  // Columns: pi/om/taup/taum per bus, phi per generator, four multipliers
  // per line, and none for angle-difference limits (the triangle has none).
  CHECK(m.lp.num_vars() == 4 * nb + ng + 4 * nl);

  // With one generator per bus the count collapses to lines + 3 * buses.
  Network one;
  one.base_mva = 100.0;
  one.angle_bound_rad = 1.0;
  for (int b = 0; b < 3; ++b) {
    Bus bus;
    bus.id = "b" + std::to_string(b + 1);
    bus.demand_mw = 20.0;
    one.buses.push_back(bus);
    Generator g;
    g.id = "g" + std::to_string(b + 1);
    g.bus = bus.id;
    g.pmax_mw = 25.0;
    one.generators.push_back(g);
  }
  Line l;
  l.id = "l12";
  l.from = "b1";
  l.to = "b2";
  l.susceptance = 10.0;
  l.thermal_mw = 30.0;
  one.lines.push_back(l);
  l.id = "l23";
  l.from = "b2";
  l.to = "b3";
  one.lines.push_back(l);
  one.validate();
  DualModel m1 = build_dual_lp(one, all_on(), {});
  CHECK(m1.lp.num_rows() == 2 + 3 * 3);
}

TEST_CASE("attacking every generator sheds the whole demand") {
  Rng rng(411u);
  for (int t = 0; t < 5; ++t) {
    const Network net = random_network(rng);
    InterdictionPlan plan;
    for (const auto& g : net.generators) plan.attacked_gens.push_back(g.id);
    const double opt = dual_optimum(net, all_on(), plan);
    CHECK(opt == Catch::Approx(total_demand(net)).margin(1e-6));
  }
}

TEST_CASE("strong duality holds across random instances") {
  Rng rng(20260819u);
  for (int t = 0; t < 100; ++t) {
    const Network net = random_network(rng);
    const Scenario sc = random_scenario(rng, net, "s1");
    InterdictionPlan plan;
    const int k = static_cast<int>(rng.in_range(0, 2));
    for (int a = 0; a < k; ++a) {
      const std::size_t pick =
          rng.below(net.lines.size() + net.generators.size());
      if (pick < net.lines.size()) {
        const std::string& id = net.lines[pick].id;
        bool dup = false;
        for (const auto& s : plan.attacked_lines) dup = dup || s == id;
        if (!dup) plan.attacked_lines.push_back(id);
      } else {
        const std::string& id = net.generators[pick - net.lines.size()].id;
        bool dup = false;
        for (const auto& s : plan.attacked_gens) dup = dup || s == id;
        if (!dup) plan.attacked_gens.push_back(id);
      }
    }
    const double primal = solve_inner(net, sc, plan).shed_total_mw;
    const double dual = dual_optimum(net, sc, plan);
    INFO("instance " << t);
    CHECK(std::fabs(primal - dual) <= 1e-6 * (1.0 + std::fabs(primal)));
  }
}

TEST_CASE("fixed caps cover every dual variable with the demand scale") {
  const Network net = t3();
  ScenarioSet ss;
  ss.scenarios.push_back(all_on());
  const DualBoundReport rep =
      compute_dual_bounds(net, ss, DualBoundPolicy::fixed_cap);
  const double D = total_demand(net);
  CHECK(rep.d_tot == Catch::Approx(D));
  CHECK(rep.policy == DualBoundPolicy::fixed_cap);
  CHECK(rep.notes.empty());
  // pi/om per bus, phi per generator, six entries per line (four raw
  // multipliers plus two lifted sums); no angle-difference limits here.
  CHECK(rep.bound.size() == 2 * 3 + 1 + 6 * 3);
  CHECK(rep.bound.at("pi:b1").lo == Catch::Approx(-D));
  CHECK(rep.bound.at("pi:b1").hi == Catch::Approx(D));
  CHECK(rep.bound.at("om:b3").hi == Catch::Approx(D));
  CHECK(rep.bound.at("gam:l12").hi == Catch::Approx(2 * D));
  CHECK(rep.bound.at("del:l23").hi == Catch::Approx(2 * D));
  for (const auto& [name, b] : rep.bound) {
    INFO(name);
    CHECK(b.source == "fixed_cap");
    CHECK(b.lo <= b.hi);
  }
}

TEST_CASE("probes tighten the balance multiplier on a single-bus system") {
  // One 50 MW bus: the shed stationarity row -50 pi - om <= 50 with
  // om <= 50 forces pi >= -2, far tighter than the fixed cap of -50.
  Network net;
  net.base_mva = 100.0;
  net.angle_bound_rad = 1.0;
  Bus b;
  b.id = "b1";
  b.demand_mw = 50.0;
  net.buses.push_back(b);
  Generator g;
  g.id = "g1";
  g.bus = "b1";
  g.pmax_mw = 30.0;
  net.generators.push_back(g);
  net.validate();
  ScenarioSet ss;
  ss.scenarios.push_back(all_on());

  const DualBoundReport rep =
      compute_dual_bounds(net, ss, DualBoundPolicy::probe_lp);
  CHECK(rep.policy == DualBoundPolicy::probe_lp);
  CHECK(rep.notes.empty());
  CHECK(rep.bound.at("pi:b1").lo == Catch::Approx(-2.0).margin(1e-9));
  CHECK(rep.bound.at("pi:b1").hi == Catch::Approx(50.0).margin(1e-9));
  CHECK(rep.bound.at("pi:b1").source == "probe");
  CHECK(rep.bound.at("om:b1").hi == Catch::Approx(50.0).margin(1e-9));
  CHECK(rep.bound.at("phi:g1").hi == Catch::Approx(50.0).margin(1e-9));
}

TEST_CASE("probe bounds are never looser than the fixed caps") {
  Rng rng(902u);
  const Network net = random_network(rng);
  ScenarioSet ss = random_scenarios(rng, net, 2);
  const DualBoundReport fixed =
      compute_dual_bounds(net, ss, DualBoundPolicy::fixed_cap);
  const DualBoundReport probed =
      compute_dual_bounds(net, ss, DualBoundPolicy::probe_lp);
  CHECK(probed.notes.empty());
  REQUIRE(probed.bound.size() == fixed.bound.size());
  for (const auto& [name, fb] : fixed.bound) {
    const DualBound& pb = probed.bound.at(name);
    INFO(name);
    CHECK(pb.lo >= fb.lo - 1e-9);
    CHECK(pb.hi <= fb.hi + 1e-9);
    CHECK(pb.source == "probe");
  }

  // The boxes remain valid: the dual optimum of a sample instance is
  // attained inside them (re-solving with the probe boxes imposed keeps
  // the same optimum).
  const Scenario& sc = ss.scenarios[0];
  DualModel m = build_dual_lp(net, sc, {});
  const double free_opt = [&] {
    LpSolution s = solve_lp(m.lp);
    REQUIRE(s.status == LpSolution::Status::optimal);
    return s.objective;
  }();
  for (int j = 0; j < m.lp.num_vars(); ++j) {
    auto it = probed.bound.find(m.lp.var_name[j]);
    if (it == probed.bound.end()) continue;
    m.lp.var_lo[j] = it->second.lo;
    m.lp.var_hi[j] = it->second.hi;
  }
  LpSolution boxed = solve_lp(m.lp);
  REQUIRE(boxed.status == LpSolution::Status::optimal);
  CHECK(boxed.objective == Catch::Approx(free_opt).margin(1e-6));
}

TEST_CASE("dual rejects invalid scenario and plan references") {
  const Network net = t3();
  Scenario bad = all_on();
  bad.off_lines.push_back("nope");
  CHECK_THROWS_AS(build_dual_lp(net, bad, {}), ConfigError);
  CHECK_THROWS_AS(build_dual_lp(net, all_on(), {{}, {"ghost"}}), ConfigError);
}
