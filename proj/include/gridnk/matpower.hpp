// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/network.hpp"

namespace gridnk {

struct MatpowerOptions {
  // Case files carry no global angle box; this supplies one.
  double angle_bound_rad = 0.6;
  // Cap used for branches whose RATE_A is 0 ("unlimited" in the source
  // format). Non-positive means: use 2 x total demand of the case.
  double unlimited_rate_cap_mw = -1.0;
};

namespace detail {

struct MpTable {
  std::vector<std::vector<double>> rows;
};

inline std::string strip_matlab_comments(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_comment = false;
  for (char c : text) {
    if (c == '%') in_comment = true;
    if (c == '\n') in_comment = false;
    out.push_back(in_comment ? ' ' : c);
  }
  return out;
}

// Position just after "mpc.<name>" where <name> matches exactly (so "gen"
// does not match "gencost"); npos when the case never assigns it.
inline std::size_t find_assignment(const std::string& text,
                                   const std::string& name) {
  const std::string needle = "mpc." + name;
  std::size_t at = 0;
  while ((at = text.find(needle, at)) != std::string::npos) {
    const std::size_t end = at + needle.size();
    const char next = end < text.size() ? text[end] : '\0';
    if (!(std::isalnum(static_cast<unsigned char>(next)) || next == '_')) {
      std::size_t p = end;
      while (p < text.size() &&
             std::isspace(static_cast<unsigned char>(text[p])))
        ++p;
      if (p < text.size() && text[p] == '=') return p + 1;
    }
    at = end;
  }
  return std::string::npos;
}

inline double parse_cell(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty())
    throw ConfigError("matpower: non-numeric cell '" + tok + "' in " + where);
  return v;
}

inline MpTable parse_table(const std::string& text, const std::string& name) {
  std::size_t p = find_assignment(text, name);
  if (p == std::string::npos)
    throw ConfigError("matpower: missing table " + name);
  while (p < text.size() && std::isspace(static_cast<unsigned char>(text[p])))
    ++p;
  if (p >= text.size() || text[p] != '[')
    throw ConfigError("matpower: table " + name + " is not a matrix");
  const std::size_t close = text.find(']', ++p);
  if (close == std::string::npos)
    throw ConfigError("matpower: unterminated matrix for " + name);
  const std::string body = text.substr(p, close - p);

  MpTable table;
  std::vector<double> row;
  std::string tok;
  auto flush_tok = [&]() {
    if (tok.empty()) return;
    const std::string where =
        name + " row " + std::to_string(table.rows.size() + 1);
    row.push_back(parse_cell(tok, where));
    tok.clear();
  };
  auto flush_row = [&]() {
    flush_tok();
    if (!row.empty()) {
      table.rows.push_back(row);
      row.clear();
    }
  };
  for (char c : body) {
    if (c == ';' || c == '\n') {
      flush_row();
    } else if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
      flush_tok();
    } else {
      tok.push_back(c);
    }
  }
  flush_row();
  return table;
}

inline double parse_scalar(const std::string& text, const std::string& name) {
  std::size_t p = find_assignment(text, name);
  if (p == std::string::npos)
    throw ConfigError("matpower: missing scalar " + name);
  const std::size_t semi = text.find(';', p);
  std::string tok = text.substr(p, semi == std::string::npos ? std::string::npos
                                                             : semi - p);
  std::size_t a = 0, b = tok.size();
  while (a < b && std::isspace(static_cast<unsigned char>(tok[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(tok[b - 1]))) --b;
  return parse_cell(tok.substr(a, b - a), name);
}

inline std::string integral_id(double v, const std::string& where) {
  const double r = std::round(v);
  if (!std::isfinite(v) || std::fabs(v - r) > 1e-9)
    throw ConfigError("matpower: " + where + " must be an integral bus number");
  return std::to_string(static_cast<long long>(r));
}

}  // namespace detail

// Reads the subset of a MATLAB-style case needed here: mpc.baseMVA, and the
// bus (BUS_I, PD), gen (GEN_BUS, PMAX) and branch (F_BUS, T_BUS, BR_X,
// RATE_A) tables by column position. Everything else in the file is ignored.
// Susceptance is taken as 1/BR_X.
inline Network parse_matpower_case(const std::string& raw,
                                   const MatpowerOptions& opts = {}) {
  const std::string text = detail::strip_matlab_comments(raw);
  Network net;
  net.base_mva = detail::parse_scalar(text, "baseMVA");
  net.angle_bound_rad = opts.angle_bound_rad;

  const detail::MpTable bus = detail::parse_table(text, "bus");
  const detail::MpTable gen = detail::parse_table(text, "gen");
  const detail::MpTable branch = detail::parse_table(text, "branch");

  for (std::size_t r = 0; r < bus.rows.size(); ++r) {
    const auto& row = bus.rows[r];
    if (row.size() < 3)
      throw ConfigError("matpower: bus row " + std::to_string(r + 1) +
                        " has fewer than 3 columns");
    Bus b;
    b.id = detail::integral_id(row[0], "bus row " + std::to_string(r + 1));
    b.demand_mw = row[2];
    net.buses.push_back(std::move(b));
  }

  for (std::size_t r = 0; r < gen.rows.size(); ++r) {
    const auto& row = gen.rows[r];
    if (row.size() < 9)
      throw ConfigError("matpower: gen row " + std::to_string(r + 1) +
                        " has fewer than 9 columns");
    Generator g;
    g.id = "g" + std::to_string(r + 1);
    g.bus = detail::integral_id(row[0], "gen row " + std::to_string(r + 1));
    g.pmax_mw = row[8];
    net.generators.push_back(std::move(g));
  }

  double cap = opts.unlimited_rate_cap_mw;
  if (cap <= 0.0) cap = 2.0 * total_demand(net);

  for (std::size_t r = 0; r < branch.rows.size(); ++r) {
    const auto& row = branch.rows[r];
    if (row.size() < 6)
      throw ConfigError("matpower: branch row " + std::to_string(r + 1) +
                        " has fewer than 6 columns");
    Line l;
    l.id = "l" + std::to_string(r + 1);
    l.from = detail::integral_id(row[0], "branch row " + std::to_string(r + 1));
    l.to = detail::integral_id(row[1], "branch row " + std::to_string(r + 1));
    const double x = row[3];
    if (x == 0.0)
      throw ConfigError("matpower: branch row " + std::to_string(r + 1) +
                        " has zero reactance");
    l.susceptance = 1.0 / x;
    const double rate_a = row[5];
    if (rate_a < 0.0)
      throw ConfigError("matpower: branch row " + std::to_string(r + 1) +
                        " has negative RATE_A");
    l.thermal_mw = rate_a == 0.0 ? cap : rate_a;
    net.lines.push_back(std::move(l));
  }

  net.validate();
  return net;
}

}  // namespace gridnk
