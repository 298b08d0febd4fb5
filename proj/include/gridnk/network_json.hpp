// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "json.hpp"

#include "gridnk/common.hpp"
#include "gridnk/network.hpp"

namespace gridnk {

namespace detail {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

inline void reject_unknown_keys(const Json& obj, const char* const* allowed,
                                std::size_t n_allowed,
                                const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (std::size_t a = 0; a < n_allowed; ++a)
      if (it.key() == allowed[a]) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("network json: unknown key " + path + "." + it.key());
  }
}

inline const Json& require(const Json& obj, const char* key,
                           const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("network json: missing key " + path + "." + key);
  return *it;
}

inline double as_number(const Json& v, const std::string& path) {
  if (!v.is_number())
    throw ConfigError("network json: " + path + " must be a number");
  return v.get<double>();
}

inline std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string())
    throw ConfigError("network json: " + path + " must be a string");
  return v.get<std::string>();
}

inline const Json& as_array(const Json& v, const std::string& path) {
  if (!v.is_array())
    throw ConfigError("network json: " + path + " must be an array");
  return v;
}

inline const Json& as_object(const Json& v, const std::string& path) {
  if (!v.is_object())
    throw ConfigError("network json: " + path + " must be an object");
  return v;
}

}  // namespace detail

// Schema: top-level keys base_mva, angle_bound_rad, buses, generators, lines.
// Unknown keys are rejected anywhere with the offending field path in the
// error message. generators/lines may be omitted and default to empty.
inline Network parse_network_json(const std::string& text) {
  using detail::as_array;
  using detail::as_number;
  using detail::as_object;
  using detail::as_string;
  using detail::require;
  using Json = detail::Json;

  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("network json: parse error: ") + e.what());
  }
  as_object(root, "$");
  static const char* kTop[] = {"base_mva", "angle_bound_rad", "buses",
                               "generators", "lines"};
  detail::reject_unknown_keys(root, kTop, 5, "$");

  Network net;
  net.base_mva = as_number(require(root, "base_mva", "$"), "$.base_mva");
  net.angle_bound_rad =
      as_number(require(root, "angle_bound_rad", "$"), "$.angle_bound_rad");

  const Json& buses = as_array(require(root, "buses", "$"), "$.buses");
  for (std::size_t i = 0; i < buses.size(); ++i) {
    const std::string path = "$.buses[" + std::to_string(i) + "]";
    const Json& jb = as_object(buses[i], path);
    static const char* kBus[] = {"id", "demand_mw", "coord"};
    detail::reject_unknown_keys(jb, kBus, 3, path);
    Bus b;
    b.id = as_string(require(jb, "id", path), path + ".id");
    b.demand_mw =
        as_number(require(jb, "demand_mw", path), path + ".demand_mw");
    if (jb.contains("coord")) {
      const Json& jc = as_object(jb["coord"], path + ".coord");
      static const char* kCoord[] = {"lon", "lat"};
      detail::reject_unknown_keys(jc, kCoord, 2, path + ".coord");
      Coord c;
      c.lon = as_number(require(jc, "lon", path + ".coord"),
                        path + ".coord.lon");
      c.lat = as_number(require(jc, "lat", path + ".coord"),
                        path + ".coord.lat");
      b.coord = c;
    }
    net.buses.push_back(std::move(b));
  }

  if (root.contains("generators")) {
    const Json& gens = as_array(root["generators"], "$.generators");
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const std::string path = "$.generators[" + std::to_string(i) + "]";
      const Json& jg = as_object(gens[i], path);
      static const char* kGen[] = {"id", "bus", "pmax_mw"};
      detail::reject_unknown_keys(jg, kGen, 3, path);
      Generator g;
      g.id = as_string(require(jg, "id", path), path + ".id");
      g.bus = as_string(require(jg, "bus", path), path + ".bus");
      g.pmax_mw = as_number(require(jg, "pmax_mw", path), path + ".pmax_mw");
      net.generators.push_back(std::move(g));
    }
  }

  if (root.contains("lines")) {
    const Json& lines = as_array(root["lines"], "$.lines");
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const std::string path = "$.lines[" + std::to_string(i) + "]";
      const Json& jl = as_object(lines[i], path);
      static const char* kLine[] = {"id",          "from",       "to",
                                    "susceptance", "thermal_mw",
                                    "angle_diff_max_rad"};
      detail::reject_unknown_keys(jl, kLine, 6, path);
      Line l;
      l.id = as_string(require(jl, "id", path), path + ".id");
      l.from = as_string(require(jl, "from", path), path + ".from");
      l.to = as_string(require(jl, "to", path), path + ".to");
      l.susceptance =
          as_number(require(jl, "susceptance", path), path + ".susceptance");
      l.thermal_mw =
          as_number(require(jl, "thermal_mw", path), path + ".thermal_mw");
      if (jl.contains("angle_diff_max_rad"))
        l.angle_diff_max_rad =
            as_number(jl["angle_diff_max_rad"], path + ".angle_diff_max_rad");
      net.lines.push_back(std::move(l));
    }
  }

  net.validate();
  return net;
}

// Inverse of parse_network_json: parse(serialize(net)) == net field for
// field (numbers survive the round trip exactly).
inline std::string serialize_network_json(const Network& net) {
  using OrderedJson = detail::OrderedJson;
  OrderedJson root;
  root["base_mva"] = net.base_mva;
  root["angle_bound_rad"] = net.angle_bound_rad;
  root["buses"] = OrderedJson::array();
  for (const Bus& b : net.buses) {
    OrderedJson jb;
    jb["id"] = b.id;
    jb["demand_mw"] = b.demand_mw;
    if (b.coord) {
      jb["coord"] = OrderedJson{{"lon", b.coord->lon}, {"lat", b.coord->lat}};
    }
    root["buses"].push_back(std::move(jb));
  }
  root["generators"] = OrderedJson::array();
  for (const Generator& g : net.generators) {
    OrderedJson jg;
    jg["id"] = g.id;
    jg["bus"] = g.bus;
    jg["pmax_mw"] = g.pmax_mw;
    root["generators"].push_back(std::move(jg));
  }
  root["lines"] = OrderedJson::array();
  for (const Line& l : net.lines) {
    OrderedJson jl;
    jl["id"] = l.id;
    jl["from"] = l.from;
    jl["to"] = l.to;
    jl["susceptance"] = l.susceptance;
    jl["thermal_mw"] = l.thermal_mw;
    if (l.angle_diff_max_rad) jl["angle_diff_max_rad"] = *l.angle_diff_max_rad;
    root["lines"].push_back(std::move(jl));
  }
  return root.dump(2) + "\n";
}

}  // namespace gridnk
