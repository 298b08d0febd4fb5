// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the test binaries: file loading, the 3-bus triangle,
// and seeded random instance generators sized so brute-force oracles stay
// cheap.
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "gridnk/common.hpp"
#include "gridnk/network.hpp"
#include "gridnk/network_json.hpp"
#include "gridnk/scenario.hpp"

namespace testsupport {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string source_path(const std::string& rel) {
  return std::string(GRIDNK_SOURCE_DIR) + "/" + rel;
}

// 3-bus triangle: 100 MW demand opposite a 100 MW generator, 60 MW lines.
inline gridnk::Network t3() {
  return gridnk::parse_network_json(read_file(source_path("data/t3.json")));
}

// Connected random network: 4-8 buses on a random spanning tree plus a few
// extra lines, 2-4 generators, per-unit susceptances in [8,16] and thermal
// limits in [20,60] MW so healthy angle spreads stay well inside the box.
inline gridnk::Network random_network(gridnk::Rng& rng) {
  using namespace gridnk;
  Network net;
  net.base_mva = 100.0;
  net.angle_bound_rad = 1.0;
  const int nb = static_cast<int>(rng.in_range(4, 8));
  for (int b = 0; b < nb; ++b) {
    Bus bus;
    bus.id = "b" + std::string(b < 9 ? "0" : "") + std::to_string(b + 1);
    bus.demand_mw = rng.bernoulli(0.5) ? rng.uniform(10.0, 60.0) : 0.0;
    bus.coord = Coord{rng.uniform(0.0, 10.0), rng.uniform(0.0, 10.0)};
    net.buses.push_back(std::move(bus));
  }
  bool any_demand = false;
  for (const Bus& b : net.buses) any_demand = any_demand || b.demand_mw > 0.0;
  if (!any_demand) net.buses.back().demand_mw = 40.0;

  const int ngen = static_cast<int>(rng.in_range(2, 4));
  for (int g = 0; g < ngen; ++g) {
    Generator gen;
    gen.id = "g" + std::to_string(g + 1);
    gen.bus = net.buses[rng.below(nb)].id;
    gen.pmax_mw = rng.uniform(30.0, 80.0);
    net.generators.push_back(std::move(gen));
  }

  int line_no = 0;
  auto add_line = [&](int i, int j) {
    Line l;
    ++line_no;
    l.id = "l" + std::string(line_no < 10 ? "0" : "") + std::to_string(line_no);
    l.from = net.buses[i].id;
    l.to = net.buses[j].id;
    l.susceptance = rng.uniform(8.0, 16.0);
    l.thermal_mw = rng.uniform(20.0, 60.0);
    if (rng.bernoulli(0.2)) l.angle_diff_max_rad = rng.uniform(0.05, 0.3);
    net.lines.push_back(std::move(l));
  };
  for (int b = 1; b < nb; ++b) add_line(b, static_cast<int>(rng.below(b)));
  const int extra = static_cast<int>(rng.in_range(0, 3));
  for (int e = 0; e < extra; ++e) {
    const int i = static_cast<int>(rng.below(nb));
    int j = static_cast<int>(rng.below(nb));
    if (i == j) j = (j + 1) % nb;
    add_line(i, j);
  }
  net.validate();
  return net;
}

inline gridnk::Scenario random_scenario(gridnk::Rng& rng,
                                        const gridnk::Network& net,
                                        const std::string& id) {
  gridnk::Scenario sc;
  sc.id = id;
  for (const auto& l : net.lines)
    if (rng.bernoulli(0.15)) sc.off_lines.push_back(l.id);
  for (const auto& g : net.generators)
    if (rng.bernoulli(0.1)) sc.off_gens.push_back(g.id);
  return sc;
}

inline gridnk::ScenarioSet random_scenarios(gridnk::Rng& rng,
                                            const gridnk::Network& net,
                                            int count) {
  gridnk::ScenarioSet ss;
  for (int i = 0; i < count; ++i)
    ss.scenarios.push_back(
        random_scenario(rng, net, "s" + std::to_string(i + 1)));
  for (auto& s : ss.scenarios) s.weight = 1.0 / count;
  return ss;
}

}  // namespace testsupport
