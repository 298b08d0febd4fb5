// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "gridnk/common.hpp"
#include "gridnk/network.hpp"

namespace gridnk {

// One component-availability sample: the listed components are off (their
// availability indicator is 0), everything else is on.
struct Scenario {
  std::string id;
  std::vector<std::string> off_lines;  // sorted
  std::vector<std::string> off_gens;   // sorted
  double weight = 1.0;
};

struct ScenarioSet {
  std::vector<Scenario> scenarios;
};

inline void validate_scenarios(const ScenarioSet& ss, const Network& net) {
  std::set<std::string> seen;
  for (const Scenario& s : ss.scenarios) {
    if (s.id.empty()) throw ConfigError("scenario with empty id");
    if (!seen.insert(s.id).second)
      throw ConfigError("duplicate scenario id " + s.id);
    if (!(s.weight > 0.0) || !std::isfinite(s.weight))
      throw ConfigError("scenario " + s.id + ": weight must be positive");
    for (const std::string& l : s.off_lines)
      if (net.line_index(l) < 0)
        throw ConfigError("scenario " + s.id + " references missing line " + l);
    for (const std::string& g : s.off_gens)
      if (net.generator_index(g) < 0)
        throw ConfigError("scenario " + s.id + " references missing generator " +
                          g);
  }
}

inline ScenarioSet normalize(ScenarioSet ss) {
  if (ss.scenarios.empty())
    throw ConfigError("normalize: empty scenario set");
  double sum = 0.0;
  for (const Scenario& s : ss.scenarios) {
    if (!(s.weight > 0.0) || !std::isfinite(s.weight))
      throw ConfigError("normalize: weights must be positive");
    sum += s.weight;
  }
  for (Scenario& s : ss.scenarios) s.weight /= sum;
  return ss;
}

// Expected availability per component under the scenario weights:
// 1 minus the total weight of the scenarios where the component is off.
struct MeanAvailability {
  std::map<std::string, double> line;  // line id -> availability in [0,1]
  std::map<std::string, double> gen;   // generator id -> availability in [0,1]
};

inline MeanAvailability mean_availability(const ScenarioSet& ss,
                                          const Network& net) {
  MeanAvailability out;
  for (const Line& l : net.lines) out.line[l.id] = 1.0;
  for (const Generator& g : net.generators) out.gen[g.id] = 1.0;
  for (const Scenario& s : ss.scenarios) {
    for (const std::string& l : s.off_lines) out.line.at(l) -= s.weight;
    for (const std::string& g : s.off_gens) out.gen.at(g) -= s.weight;
  }
  // Guard against rounding just below 0 / above 1.
  for (auto& [k, v] : out.line) v = std::clamp(v, 0.0, 1.0);
  for (auto& [k, v] : out.gen) v = std::clamp(v, 0.0, 1.0);
  return out;
}

namespace detail {

// Seeded k-means (greedy D^2 seeding, then Lloyd's algorithm with a fixed
// iteration cap). Returns the cluster label per bus, with cluster indices
// renumbered so centroids are in lexicographic (lon, lat) order — the
// cluster index a caller picks is therefore stable for a given input.
inline std::vector<int> cluster_buses(const Network& net, int n_clusters,
                                      Rng& rng) {
  const int n = static_cast<int>(net.buses.size());
  if (n_clusters < 1) throw ConfigError("clustering: n_clusters must be >= 1");
  std::vector<Coord> pts(n);
  for (int i = 0; i < n; ++i) {
    if (!net.buses[i].coord)
      throw ConfigError("clustering: bus " + net.buses[i].id +
                        " has no coordinates");
    pts[i] = *net.buses[i].coord;
  }
  auto d2 = [](const Coord& a, const Coord& b) {
    const double dx = a.lon - b.lon;
    const double dy = a.lat - b.lat;
    return dx * dx + dy * dy;
  };

  const int k = std::min(n_clusters, n);
  std::vector<Coord> cent;
  cent.push_back(pts[rng.below(static_cast<std::uint64_t>(n))]);
  std::vector<double> best(n);
  for (int i = 0; i < n; ++i) best[i] = d2(pts[i], cent[0]);
  while (static_cast<int>(cent.size()) < k) {
    double total = 0.0;
    for (double v : best) total += v;
    int pick;
    if (total <= 0.0) {
      pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    } else {
      const double r = rng.real01() * total;
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += best[i];
        if (r < acc) {
          pick = i;
          break;
        }
      }
    }
    cent.push_back(pts[pick]);
    for (int i = 0; i < n; ++i)
      best[i] = std::min(best[i], d2(pts[i], cent.back()));
  }

  std::vector<int> label(n, 0);
  for (int round = 0; round < 100; ++round) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double bd = d2(pts[i], cent[0]);
      for (int c = 1; c < k; ++c) {
        const double dd = d2(pts[i], cent[c]);
        if (dd < bd) {
          bd = dd;
          arg = c;
        }
      }
      if (arg != label[i]) {
        label[i] = arg;
        changed = true;
      }
    }
    if (!changed && round > 0) break;
    for (int c = 0; c < k; ++c) {
      double sx = 0.0, sy = 0.0;
      int cnt = 0;
      for (int i = 0; i < n; ++i)
        if (label[i] == c) {
          sx += pts[i].lon;
          sy += pts[i].lat;
          ++cnt;
        }
      if (cnt > 0) cent[c] = {sx / cnt, sy / cnt};  // empty: keep previous
    }
  }

  // Renumber clusters by centroid lexicographic order.
  std::vector<int> order(k);
  for (int c = 0; c < k; ++c) order[c] = c;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cent[a].lon != cent[b].lon) return cent[a].lon < cent[b].lon;
    if (cent[a].lat != cent[b].lat) return cent[a].lat < cent[b].lat;
    return a < b;
  });
  std::vector<int> rank(k);
  for (int r = 0; r < k; ++r) rank[order[r]] = r;
  for (int& l : label) l = rank[l];
  return label;
}

}  // namespace detail

// Geographic-cluster outage sampling: cluster the buses, take the
// generators and fully-interior lines of one cluster as candidates, and draw
// independent per-candidate outage marks, resampling each scenario until the
// outage count lands in [lo, hi]. Identical inputs (including seed) produce
// an identical ScenarioSet.
inline ScenarioSet generate_scenarios(const Network& net, int n_clusters,
                                      int cluster_index, int n_scenarios,
                                      std::pair<int, int> outage_range,
                                      double bernoulli_p, std::uint64_t seed) {
  const auto [lo, hi] = outage_range;
  if (n_scenarios < 1)
    throw ConfigError("generate_scenarios: n_scenarios must be >= 1");
  if (lo < 1 || lo > hi)
    throw ConfigError("generate_scenarios: need 1 <= lo <= hi");
  if (cluster_index < 0 || cluster_index >= n_clusters)
    throw ConfigError("generate_scenarios: cluster_index out of range");

  Rng rng(seed);
  const std::vector<int> label = detail::cluster_buses(net, n_clusters, rng);

  std::set<std::string> member;  // bus ids of the chosen cluster
  for (std::size_t i = 0; i < net.buses.size(); ++i)
    if (label[i] == cluster_index) member.insert(net.buses[i].id);

  // Candidates in canonical order: generators by id, then lines by id.
  std::vector<std::pair<bool, std::string>> cand;  // (is_gen, id)
  {
    std::vector<std::string> gens, lines;
    for (const Generator& g : net.generators)
      if (member.count(g.bus)) gens.push_back(g.id);
    for (const Line& l : net.lines)
      if (member.count(l.from) && member.count(l.to)) lines.push_back(l.id);
    std::sort(gens.begin(), gens.end());
    std::sort(lines.begin(), lines.end());
    for (auto& g : gens) cand.emplace_back(true, std::move(g));
    for (auto& l : lines) cand.emplace_back(false, std::move(l));
  }
  const int nc = static_cast<int>(cand.size());
  if (nc < lo)
    throw ConfigError("generate_scenarios: cluster " +
                      std::to_string(cluster_index) + " has only " +
                      std::to_string(nc) + " candidate components, need >= " +
                      std::to_string(lo));

  double p = bernoulli_p;
  if (p <= 0.0) p = std::min(0.9, 5.0 / nc);  // default: mid-window count
  if (p >= 1.0)
    throw ConfigError("generate_scenarios: bernoulli_p must be in (0,1)");

  ScenarioSet ss;
  const long kAttemptCap = 100000;
  for (int s = 0; s < n_scenarios; ++s) {
    Scenario sc;
    sc.id = "s" + std::to_string(s + 1);
    sc.weight = 1.0 / n_scenarios;
    long attempts = 0;
    while (true) {
      if (++attempts > kAttemptCap)
        throw ConfigError(
            "generate_scenarios: outage count window [" + std::to_string(lo) +
            "," + std::to_string(hi) +
            "] not reached after " + std::to_string(kAttemptCap) +
            " draws; adjust bernoulli_p or the window");
      sc.off_gens.clear();
      sc.off_lines.clear();
      int count = 0;
      for (const auto& [is_gen, id] : cand) {
        if (!rng.bernoulli(p)) continue;
        ++count;
        if (is_gen)
          sc.off_gens.push_back(id);
        else
          sc.off_lines.push_back(id);
      }
      if (count >= lo && count <= hi) break;
    }
    ss.scenarios.push_back(std::move(sc));
  }
  return ss;
}

// --- Scenario file format -------------------------------------------------
// {"scenarios":[{"id":…,"off_lines":[…],"off_gens":[…],"weight":…}]}

inline ScenarioSet parse_scenarios_json(const std::string& text,
                                        const Network& net) {
  using Json = nlohmann::json;
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("scenario json: parse error: ") + e.what());
  }
  if (!root.is_object() || !root.contains("scenarios") ||
      !root["scenarios"].is_array())
    throw ConfigError("scenario json: expected top-level key scenarios[]");
  for (auto it = root.begin(); it != root.end(); ++it)
    if (it.key() != "scenarios")
      throw ConfigError("scenario json: unknown key $." + it.key());

  ScenarioSet ss;
  const Json& arr = root["scenarios"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string path = "$.scenarios[" + std::to_string(i) + "]";
    const Json& js = arr[i];
    if (!js.is_object())
      throw ConfigError("scenario json: " + path + " must be an object");
    for (auto it = js.begin(); it != js.end(); ++it) {
      const std::string& k = it.key();
      if (k != "id" && k != "off_lines" && k != "off_gens" && k != "weight")
        throw ConfigError("scenario json: unknown key " + path + "." + k);
    }
    Scenario sc;
    if (!js.contains("id") || !js["id"].is_string())
      throw ConfigError("scenario json: " + path + ".id must be a string");
    sc.id = js["id"].get<std::string>();
    auto read_list = [&](const char* key, std::vector<std::string>& out) {
      if (!js.contains(key)) return;
      if (!js[key].is_array())
        throw ConfigError("scenario json: " + path + "." + key +
                          " must be an array");
      for (const auto& v : js[key]) {
        if (!v.is_string())
          throw ConfigError("scenario json: " + path + "." + key +
                            " entries must be strings");
        out.push_back(v.get<std::string>());
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    };
    read_list("off_lines", sc.off_lines);
    read_list("off_gens", sc.off_gens);
    if (!js.contains("weight") || !js["weight"].is_number())
      throw ConfigError("scenario json: " + path + ".weight must be a number");
    sc.weight = js["weight"].get<double>();
    ss.scenarios.push_back(std::move(sc));
  }
  validate_scenarios(ss, net);
  return ss;
}

inline std::string serialize_scenarios_json(const ScenarioSet& ss) {
  using OrderedJson = nlohmann::ordered_json;
  OrderedJson root;
  root["scenarios"] = OrderedJson::array();
  for (const Scenario& s : ss.scenarios) {
    OrderedJson js;
    js["id"] = s.id;
    js["off_lines"] = s.off_lines;
    js["off_gens"] = s.off_gens;
    js["weight"] = s.weight;
    root["scenarios"].push_back(std::move(js));
  }
  return root.dump(2) + "\n";
}

}  // namespace gridnk
