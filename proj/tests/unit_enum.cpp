// SPDX-License-Identifier: Apache-2.0
//
// Tests for the brute-force interdiction oracle.

#include <catch2/catch_amalgamated.hpp>

#include "gridnk/enumerate.hpp"
#include "support.hpp"

using namespace gridnk;
using namespace testsupport;

namespace {

ScenarioSet all_on_set() {
  ScenarioSet ss;
  ss.scenarios.push_back(Scenario{"s1", {}, {}, 1.0});
  return ss;
}

// Two buses, two identical parallel corridors, two redundant generators.
// Attacking either generator is harmless; attacking either line sheds 20 MW.
Network parallel_pair() {
  Network net;
  net.base_mva = 100.0;
  net.angle_bound_rad = 1.0;
  net.buses = {Bus{"b1", 0.0, Coord{0.0, 0.0}},
               Bus{"b2", 50.0, Coord{1.0, 0.0}}};
  net.generators = {Generator{"g1", "b1", 100.0},
                    Generator{"g2", "b1", 100.0}};
  net.lines = {Line{"p1", "b1", "b2", 10.0, 30.0, {}},
               Line{"p2", "b1", "b2", 10.0, 30.0, {}}};
  net.validate();
  return net;
}

}  // namespace

TEST_CASE("k = 0 evaluates exactly the empty plan") {
  const Network net = t3();
  const auto res = enumerate_exact(net, all_on_set(), 0);
  CHECK(res.evaluated == 1);
  CHECK(res.best_plan.empty());
  CHECK_THAT(res.best_value, Catch::Matchers::WithinAbs(10.0, 1e-6));
}

TEST_CASE("single generator network with k = 1 evaluates two plans") {
  Network net;
  net.base_mva = 100.0;
  net.angle_bound_rad = 1.0;
  net.buses = {Bus{"b1", 40.0, Coord{0.0, 0.0}}};
  net.generators = {Generator{"g1", "b1", 60.0}};
  net.validate();

  const auto res = enumerate_exact(net, all_on_set(), 1);
  CHECK(res.evaluated == 2);  // {} and {g1}
  CHECK(res.best_plan.attacked_gens == std::vector<std::string>{"g1"});
  CHECK(res.best_plan.attacked_lines.empty());
  CHECK_THAT(res.best_value, Catch::Matchers::WithinAbs(40.0, 1e-6));
}

TEST_CASE("three-bus triangle, k = 1: the generator is the critical asset") {
  const Network net = t3();
  EnumerateOptions opts;
  opts.keep_table = true;
  const auto res = enumerate_exact(net, all_on_set(), 1, opts);

  // {} plus four single-component plans.
  REQUIRE(res.evaluated == 5);
  REQUIRE(res.per_plan.size() == 5);
  CHECK(res.best_plan.attacked_gens == std::vector<std::string>{"g1"});
  CHECK_THAT(res.best_value, Catch::Matchers::WithinAbs(100.0, 1e-6));

  // The full table matches the hand-derived values: no attack sheds 10 MW,
  // any single line 40 MW, the generator 100 MW.
  for (const auto& [plan, value] : res.per_plan) {
    if (plan.empty()) {
      CHECK_THAT(value, Catch::Matchers::WithinAbs(10.0, 1e-6));
    } else if (!plan.attacked_gens.empty()) {
      CHECK_THAT(value, Catch::Matchers::WithinAbs(100.0, 1e-6));
    } else {
      CHECK_THAT(value, Catch::Matchers::WithinAbs(40.0, 1e-6));
    }
  }
}

TEST_CASE("equal-value plans resolve to the lexicographically first one") {
  const Network net = parallel_pair();
  EnumerateOptions opts;
  opts.keep_table = true;
  const auto res = enumerate_exact(net, all_on_set(), 1, opts);

  REQUIRE(res.evaluated == 5);
  // Generator attacks are worthless (the twin covers the load); both line
  // attacks shed 20 MW. p1 < p2, so p1 must win.
  CHECK(res.best_plan.attacked_lines == std::vector<std::string>{"p1"});
  CHECK(res.best_plan.attacked_gens.empty());
  CHECK_THAT(res.best_value, Catch::Matchers::WithinAbs(20.0, 1e-6));

  for (const auto& [plan, value] : res.per_plan) {
    if (!plan.attacked_lines.empty()) {
      CHECK_THAT(value, Catch::Matchers::WithinAbs(20.0, 1e-6));
    } else {
      CHECK_THAT(value, Catch::Matchers::WithinAbs(0.0, 1e-6));
    }
  }
}

TEST_CASE("budget_exact drops the smaller plans") {
  const Network net = t3();
  EnumerateOptions opts;
  opts.budget_exact = true;
  const auto res = enumerate_exact(net, all_on_set(), 1, opts);
  CHECK(res.evaluated == 4);  // only the four singletons
  CHECK(res.best_plan.size() == 1);

  // Exact budget k = 2 over 4 components: C(4,2) = 6 plans.
  const auto res2 = enumerate_exact(net, all_on_set(), 2, opts);
  CHECK(res2.evaluated == 6);
  CHECK(res2.best_plan.size() == 2);
  CHECK(res2.best_value >= res.best_value - 1e-9);
}

TEST_CASE("optimal value is monotone in the attack budget") {
  Rng rng(4242);
  for (int trial = 0; trial < 8; ++trial) {
    const Network net = random_network(rng);
    const ScenarioSet ss = random_scenarios(rng, net, 2);
    double prev = -1.0;
    for (int k = 0; k <= 2; ++k) {
      const auto res = enumerate_exact(net, ss, k);
      CHECK(res.best_value >= prev - 1e-7);
      CHECK(res.best_value <= total_demand(net) + 1e-7);
      CHECK(static_cast<int>(res.best_plan.size()) <= k);
      prev = res.best_value;
    }
  }
}

TEST_CASE("evaluation cap refuses oversized sweeps") {
  const Network net = t3();
  EnumerateOptions opts;
  opts.eval_cap = 4;  // five plans needed for k = 1
  CHECK_THROWS_AS(enumerate_exact(net, all_on_set(), 1, opts), CapExceeded);
  opts.eval_cap = 5;
  CHECK_NOTHROW(enumerate_exact(net, all_on_set(), 1, opts));
}

TEST_CASE("k larger than the component count saturates") {
  const Network net = parallel_pair();  // 4 components
  const auto res = enumerate_exact(net, all_on_set(), 99);
  CHECK(res.evaluated == 16);  // all subsets
  // Killing both generators (or both corridors) drops the full load; the
  // generator pair wins the tie because "g:" keys sort before "l:" keys.
  CHECK_THAT(res.best_value, Catch::Matchers::WithinAbs(50.0, 1e-6));
  CHECK(res.best_plan.attacked_gens ==
        std::vector<std::string>{"g1", "g2"});
  CHECK(res.best_plan.attacked_lines.empty());
}

TEST_CASE("parallel evaluation matches the serial result") {
  Rng rng(777);
  const Network net = random_network(rng);
  const ScenarioSet ss = random_scenarios(rng, net, 3);

  EnumerateOptions serial;
  EnumerateOptions threaded;
  threaded.n_threads = 4;
  serial.keep_table = threaded.keep_table = true;

  const auto a = enumerate_exact(net, ss, 2, serial);
  const auto b = enumerate_exact(net, ss, 2, threaded);
  REQUIRE(a.evaluated == b.evaluated);
  CHECK(a.best_value == b.best_value);
  CHECK(a.best_plan.attacked_lines == b.best_plan.attacked_lines);
  CHECK(a.best_plan.attacked_gens == b.best_plan.attacked_gens);
  for (std::size_t i = 0; i < a.per_plan.size(); ++i)
    CHECK(a.per_plan[i].second == b.per_plan[i].second);
}

TEST_CASE("negative budget is rejected") {
  CHECK_THROWS_AS(enumerate_exact(t3(), all_on_set(), -1), ConfigError);
}
