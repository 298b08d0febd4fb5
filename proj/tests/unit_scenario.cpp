// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "gridnk/common.hpp"
#include "gridnk/network.hpp"
#include "gridnk/network_json.hpp"
#include "gridnk/scenario.hpp"

using Catch::Approx;
using namespace gridnk;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Network t3() {
  return parse_network_json(
      read_file(std::string(GRIDNK_SOURCE_DIR) + "/data/t3.json"));
}

// Two geographically separated islands joined by one tie line.
Network two_groups() {
  Network net;
  net.base_mva = 100.0;
  net.angle_bound_rad = 0.5;
  net.buses = {
      {"a1", 10.0, Coord{0.0, 0.0}},  {"a2", 0.0, Coord{0.2, 0.1}},
      {"b1", 10.0, Coord{10.0, 0.0}}, {"b2", 0.0, Coord{10.2, 0.1}},
  };
  net.generators = {{"gA", "a1", 20.0}, {"gB", "b1", 20.0}};
  net.lines = {
      {"la", "a1", "a2", 5.0, 50.0, {}},
      {"lb", "b1", "b2", 5.0, 50.0, {}},
      {"tie", "a2", "b1", 5.0, 50.0, {}},
  };
  net.validate();
  return net;
}

}  // namespace

TEST_CASE("weight normalization", "[scenario]") {
  ScenarioSet ss;
  for (int i = 0; i < 4; ++i)
    ss.scenarios.push_back({"s" + std::to_string(i + 1), {}, {}, 1.0});
  ScenarioSet norm = normalize(ss);
  double sum = 0.0;
  for (const Scenario& s : norm.scenarios) {
    CHECK(s.weight == Approx(0.25));
    sum += s.weight;
  }
  CHECK(std::fabs(sum - 1.0) <= 1e-12);

  ScenarioSet two;
  two.scenarios = {{"a", {}, {}, 2.0}, {"b", {}, {}, 2.0}};
  two = normalize(two);
  CHECK(two.scenarios[0].weight == Approx(0.5));
  CHECK(two.scenarios[1].weight == Approx(0.5));

  ScenarioSet one;
  one.scenarios = {{"only", {}, {}, 7.0}};
  CHECK(normalize(one).scenarios[0].weight == Approx(1.0));

  ScenarioSet empty;
  CHECK_THROWS_AS(normalize(empty), ConfigError);
}

TEST_CASE("mean availability per component", "[scenario]") {
  Network net = t3();
  ScenarioSet ss;
  ss.scenarios = {
      {"s1", {"l12"}, {}, 0.25},
      {"s2", {}, {"g1"}, 0.25},
      {"s3", {}, {"g1"}, 0.25},
      {"s4", {"l12"}, {"g1"}, 0.25},
  };
  validate_scenarios(ss, net);
  MeanAvailability avail = mean_availability(ss, net);
  CHECK(avail.line.at("l12") == Approx(0.5));
  CHECK(avail.line.at("l13") == Approx(1.0));  // off in no scenario
  CHECK(avail.line.at("l23") == Approx(1.0));
  CHECK(avail.gen.at("g1") == Approx(0.25));   // off in 3 of 4

  ScenarioSet all_off;
  all_off.scenarios = {{"s1", {"l12"}, {}, 1.0}};
  CHECK(mean_availability(all_off, net).line.at("l12") == 0.0);
}

TEST_CASE("outage sampling respects the count window", "[scenario]") {
  Network net = t3();
  ScenarioSet ss =
      generate_scenarios(net, 1, 0, 50, {1, 2}, -1.0, 42u);
  REQUIRE(ss.scenarios.size() == 50);
  double wsum = 0.0;
  for (const Scenario& s : ss.scenarios) {
    const int count =
        static_cast<int>(s.off_lines.size() + s.off_gens.size());
    CHECK(count >= 1);
    CHECK(count <= 2);
    CHECK(s.weight == Approx(1.0 / 50));
    wsum += s.weight;
  }
  CHECK(wsum == Approx(1.0));
  validate_scenarios(ss, net);
}

TEST_CASE("identical seed gives a byte-identical scenario file", "[scenario]") {
  Network net = t3();
  ScenarioSet a = generate_scenarios(net, 1, 0, 20, {1, 2}, 0.4, 777u);
  ScenarioSet b = generate_scenarios(net, 1, 0, 20, {1, 2}, 0.4, 777u);
  CHECK(serialize_scenarios_json(a) == serialize_scenarios_json(b));

  ScenarioSet c = generate_scenarios(net, 1, 0, 20, {1, 2}, 0.4, 778u);
  CHECK(serialize_scenarios_json(a) != serialize_scenarios_json(c));
}

TEST_CASE("sampling draws only from the chosen cluster", "[scenario]") {
  Network net = two_groups();
  // Cluster 0 is the lexicographically smaller centroid: the "a" island.
  ScenarioSet left = generate_scenarios(net, 2, 0, 30, {1, 2}, 0.5, 5u);
  for (const Scenario& s : left.scenarios) {
    for (const std::string& l : s.off_lines) CHECK(l == "la");
    for (const std::string& g : s.off_gens) CHECK(g == "gA");
  }
  ScenarioSet right = generate_scenarios(net, 2, 1, 30, {1, 2}, 0.5, 5u);
  for (const Scenario& s : right.scenarios) {
    for (const std::string& l : s.off_lines) CHECK(l == "lb");
    for (const std::string& g : s.off_gens) CHECK(g == "gB");
  }
  // The tie line spans both clusters, so it is never a candidate.
  MeanAvailability avail =
      mean_availability(normalize(left), net);
  CHECK(avail.line.at("tie") == Approx(1.0));
  CHECK(avail.line.at("lb") == Approx(1.0));
  CHECK(avail.gen.at("gB") == Approx(1.0));
}

TEST_CASE("sampling failure modes", "[scenario]") {
  Network net = t3();
  SECTION("window needs more candidates than the cluster holds") {
    // The single cluster has 4 candidates (one gen + three lines).
    CHECK_THROWS_AS(generate_scenarios(net, 1, 0, 5, {5, 6}, 0.5, 1u),
                    ConfigError);
  }
  SECTION("cluster index out of range") {
    CHECK_THROWS_AS(generate_scenarios(net, 2, 2, 5, {1, 2}, 0.5, 1u),
                    ConfigError);
  }
  SECTION("missing coordinates") {
    net.buses[1].coord.reset();
    net.validate();
    CHECK_THROWS_AS(generate_scenarios(net, 1, 0, 5, {1, 2}, 0.5, 1u),
                    ConfigError);
  }
  SECTION("invalid window") {
    CHECK_THROWS_AS(generate_scenarios(net, 1, 0, 5, {0, 2}, 0.5, 1u),
                    ConfigError);
    CHECK_THROWS_AS(generate_scenarios(net, 1, 0, 5, {3, 2}, 0.5, 1u),
                    ConfigError);
  }
}

TEST_CASE("scenario file round trip and validation", "[scenario]") {
  Network net = t3();
  ScenarioSet ss = generate_scenarios(net, 1, 0, 10, {1, 2}, 0.4, 99u);
  const std::string text = serialize_scenarios_json(ss);
  ScenarioSet back = parse_scenarios_json(text, net);
  CHECK(serialize_scenarios_json(back) == text);

  SECTION("unknown scenario key is rejected") {
    const std::string bad = R"({"scenarios":[
      {"id":"s1","off_lines":[],"off_gens":[],"weight":1.0,"extra":1}]})";
    CHECK_THROWS_AS(parse_scenarios_json(bad, net), ConfigError);
  }
  SECTION("missing weight is rejected") {
    const std::string bad =
        R"({"scenarios":[{"id":"s1","off_lines":[],"off_gens":[]}]})";
    CHECK_THROWS_AS(parse_scenarios_json(bad, net), ConfigError);
  }
  SECTION("unknown component id is rejected") {
    const std::string bad = R"({"scenarios":[
      {"id":"s1","off_lines":["nope"],"off_gens":[],"weight":1.0}]})";
    CHECK_THROWS_AS(parse_scenarios_json(bad, net), ConfigError);
  }
  SECTION("duplicate scenario ids are rejected") {
    const std::string bad = R"({"scenarios":[
      {"id":"s1","off_lines":[],"off_gens":[],"weight":1.0},
      {"id":"s1","off_lines":[],"off_gens":[],"weight":1.0}]})";
    CHECK_THROWS_AS(parse_scenarios_json(bad, net), ConfigError);
  }
}
