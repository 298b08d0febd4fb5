// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridnk/common.hpp"

namespace gridnk {

struct Coord {
  double lon = 0.0;
  double lat = 0.0;
};

struct Bus {
  std::string id;
  double demand_mw = 0.0;
  std::optional<Coord> coord;
};

struct Generator {
  std::string id;
  std::string bus;
  double pmax_mw = 0.0;
};

struct Line {
  std::string id;
  std::string from;
  std::string to;
  double susceptance = 0.0;  // per unit per radian
  double thermal_mw = 0.0;
  std::optional<double> angle_diff_max_rad;
};

// Immutable after validate(); safe to share read-only across threads.
struct Network {
  double base_mva = 100.0;
  double angle_bound_rad = 0.0;  // global |theta| box, required positive
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;

  int bus_index(const std::string& id) const {
    auto it = bus_idx_.find(id);
    return it == bus_idx_.end() ? -1 : it->second;
  }
  int generator_index(const std::string& id) const {
    auto it = gen_idx_.find(id);
    return it == gen_idx_.end() ? -1 : it->second;
  }
  int line_index(const std::string& id) const {
    auto it = line_idx_.find(id);
    return it == line_idx_.end() ? -1 : it->second;
  }

  // Checks every structural invariant and (re)builds the id lookup tables.
  // Must be called after manual construction; the parsers call it themselves.
  void validate() {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(base_mva) || base_mva <= 0.0)
      throw ConfigError("network: base_mva must be positive");
    if (!finite(angle_bound_rad) || angle_bound_rad <= 0.0)
      throw ConfigError("network: angle_bound_rad must be positive");

    bus_idx_.clear();
    gen_idx_.clear();
    line_idx_.clear();
    for (int i = 0; i < static_cast<int>(buses.size()); ++i) {
      const Bus& b = buses[i];
      if (b.id.empty()) throw ConfigError("network: bus with empty id");
      if (!bus_idx_.emplace(b.id, i).second)
        throw ConfigError("network: duplicate bus id " + b.id);
      if (!finite(b.demand_mw) || b.demand_mw < 0.0)
        throw ConfigError("network: bus " + b.id +
                          " demand_mw must be nonnegative");
      if (b.coord &&
          (!finite(b.coord->lon) || !finite(b.coord->lat)))
        throw ConfigError("network: bus " + b.id + " coord must be finite");
    }
    for (int i = 0; i < static_cast<int>(generators.size()); ++i) {
      const Generator& g = generators[i];
      if (g.id.empty()) throw ConfigError("network: generator with empty id");
      if (!gen_idx_.emplace(g.id, i).second)
        throw ConfigError("network: duplicate generator id " + g.id);
      if (bus_index(g.bus) < 0)
        throw ConfigError("network: generator " + g.id +
                          " references missing bus " + g.bus);
      if (!finite(g.pmax_mw) || g.pmax_mw < 0.0)
        throw ConfigError("network: generator " + g.id +
                          " pmax_mw must be nonnegative");
    }
    for (int i = 0; i < static_cast<int>(lines.size()); ++i) {
      const Line& l = lines[i];
      if (l.id.empty()) throw ConfigError("network: line with empty id");
      if (!line_idx_.emplace(l.id, i).second)
        throw ConfigError("network: duplicate line id " + l.id);
      if (bus_index(l.from) < 0)
        throw ConfigError("network: line " + l.id +
                          " references missing bus " + l.from);
      if (bus_index(l.to) < 0)
        throw ConfigError("network: line " + l.id +
                          " references missing bus " + l.to);
      if (l.from == l.to)
        throw ConfigError("network: line " + l.id +
                          " endpoints must differ");
      if (!finite(l.susceptance) || l.susceptance == 0.0)
        throw ConfigError("network: line " + l.id +
                          " susceptance must be nonzero");
      if (!finite(l.thermal_mw) || l.thermal_mw <= 0.0)
        throw ConfigError("network: line " + l.id +
                          " thermal_mw must be positive");
      if (l.angle_diff_max_rad &&
          (!finite(*l.angle_diff_max_rad) || *l.angle_diff_max_rad <= 0.0))
        throw ConfigError("network: line " + l.id +
                          " angle_diff_max_rad must be positive");
    }
  }

 private:
  std::unordered_map<std::string, int> bus_idx_;
  std::unordered_map<std::string, int> gen_idx_;
  std::unordered_map<std::string, int> line_idx_;
};

inline double total_demand(const Network& net) {
  double sum = 0.0;
  for (const Bus& b : net.buses) sum += b.demand_mw;
  return sum;
}

}  // namespace gridnk
