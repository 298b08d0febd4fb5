// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/lp.hpp"
#include "gridnk/network.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/simplex.hpp"
#include "gridnk/threads.hpp"

namespace gridnk {

// The attacker's choice: components removed from service on top of whatever
// the scenario already turned off.
struct InterdictionPlan {
  std::vector<std::string> attacked_lines;  // sorted unique by convention
  std::vector<std::string> attacked_gens;

  int size() const {
    return static_cast<int>(attacked_lines.size() + attacked_gens.size());
  }
  bool empty() const { return attacked_lines.empty() && attacked_gens.empty(); }
};

inline void validate_plan(const InterdictionPlan& plan, const Network& net) {
  for (const std::string& l : plan.attacked_lines)
    if (net.line_index(l) < 0)
      throw ConfigError("plan references missing line " + l);
  for (const std::string& g : plan.attacked_gens)
    if (net.generator_index(g) < 0)
      throw ConfigError("plan references missing generator " + g);
}

// Availability after combining the scenario state with the attack:
// a component is on iff the scenario has it on AND it is not attacked.
// Indexed by the network's line/generator order.
struct EffectiveStatus {
  std::vector<char> line_on;
  std::vector<char> gen_on;
};

inline EffectiveStatus effective_status(const Network& net, const Scenario& sc,
                                        const InterdictionPlan& plan) {
  EffectiveStatus st;
  st.line_on.assign(net.lines.size(), 1);
  st.gen_on.assign(net.generators.size(), 1);
  for (const std::string& id : sc.off_lines) st.line_on[net.line_index(id)] = 0;
  for (const std::string& id : sc.off_gens)
    st.gen_on[net.generator_index(id)] = 0;
  for (const std::string& id : plan.attacked_lines)
    st.line_on[net.line_index(id)] = 0;
  for (const std::string& id : plan.attacked_gens)
    st.gen_on[net.generator_index(id)] = 0;
  return st;
}

namespace detail {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

// One reference bus per electrical island (components of the on-line graph):
// the island's lexicographically smallest bus id gets its angle pinned to 0.
inline std::vector<char> reference_buses(const Network& net,
                                         const EffectiveStatus& st) {
  const int nb = static_cast<int>(net.buses.size());
  UnionFind uf(nb);
  for (std::size_t l = 0; l < net.lines.size(); ++l) {
    if (!st.line_on[l]) continue;
    uf.unite(net.bus_index(net.lines[l].from), net.bus_index(net.lines[l].to));
  }
  std::map<int, int> root_to_ref;  // island root -> bus index of reference
  for (int b = 0; b < nb; ++b) {
    const int root = uf.find(b);
    auto it = root_to_ref.find(root);
    if (it == root_to_ref.end() ||
        net.buses[b].id < net.buses[it->second].id)
      root_to_ref[root] = b;
  }
  std::vector<char> is_ref(nb, 0);
  for (const auto& [root, ref] : root_to_ref) is_ref[ref] = 1;
  return is_ref;
}

// Variable/row layout of the per-scenario load-shed LP. All quantities are
// per-unit internally (MW / base_mva); callers convert back.
struct InnerLayout {
  int shed0 = 0;   // one per bus, in [0,1]
  int gen0 = 0;    // one per generator
  int flow0 = 0;   // one per line
  int ang0 = 0;    // one per bus
  int bal0 = 0;    // balance row per bus
  int ohm_hi0 = 0;  // upper Ohm row per line
  int ohm_lo0 = 0;  // lower Ohm row per line
  // Angle-difference rows exist only for lines that declare a limit;
  // ad_row[l] is the index of the upper row (lower row follows), or -1.
  std::vector<int> ad_row;
};

inline LinearProgram build_inner_lp_impl(const Network& net,
                                         const EffectiveStatus& st,
                                         InnerLayout* layout_out) {
  const int nb = static_cast<int>(net.buses.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());
  const double base = net.base_mva;
  const double thetaM = net.angle_bound_rad;

  LinearProgram lp;
  InnerLayout lay;

  lay.shed0 = lp.num_vars();
  for (int b = 0; b < nb; ++b)
    lp.add_var("shed:" + net.buses[b].id, 0.0, 1.0,
               net.buses[b].demand_mw / base);
  lay.gen0 = lp.num_vars();
  for (int g = 0; g < ng; ++g) {
    const double cap = st.gen_on[g] ? net.generators[g].pmax_mw / base : 0.0;
    lp.add_var("gen:" + net.generators[g].id, 0.0, cap);
  }
  lay.flow0 = lp.num_vars();
  for (int l = 0; l < nl; ++l) {
    const double cap = st.line_on[l] ? net.lines[l].thermal_mw / base : 0.0;
    lp.add_var("flow:" + net.lines[l].id, -cap, cap);
  }
  lay.ang0 = lp.num_vars();
  const std::vector<char> is_ref = reference_buses(net, st);
  for (int b = 0; b < nb; ++b) {
    const double bound = is_ref[b] ? 0.0 : thetaM;
    lp.add_var("ang:" + net.buses[b].id, -bound, bound);
  }

  // Balance per bus: sum(gen at b) + d_b * shed_b
  //   + sum(flow of lines leaving b) - sum(flow of lines entering b) = d_b.
  lay.bal0 = lp.num_rows();
  {
    std::vector<LpRow> rows(nb);
    for (int b = 0; b < nb; ++b) {
      rows[b].name = "bal:" + net.buses[b].id;
      const double d = net.buses[b].demand_mw / base;
      rows[b].lo = rows[b].hi = d;
      if (d != 0.0) rows[b].terms.push_back({lay.shed0 + b, d});
    }
    for (int g = 0; g < ng; ++g)
      rows[net.bus_index(net.generators[g].bus)].terms.push_back(
          {lay.gen0 + g, 1.0});
    for (int l = 0; l < nl; ++l) {
      rows[net.bus_index(net.lines[l].from)].terms.push_back(
          {lay.flow0 + l, 1.0});
      rows[net.bus_index(net.lines[l].to)].terms.push_back(
          {lay.flow0 + l, -1.0});
    }
    for (auto& r : rows) lp.add_row(std::move(r));
  }

  // Ohm's law with relaxation exactly when the line is unavailable:
  //   |flow + b (theta_i - theta_j)| <= M * (1 - on),  M = |b| * 2 * thetaM.
  lay.ohm_hi0 = lp.num_rows();
  for (int l = 0; l < nl; ++l) {
    const Line& ln = net.lines[l];
    const double M = std::fabs(ln.susceptance) * 2.0 * thetaM;
    const double slack = st.line_on[l] ? 0.0 : M;
    const int fi = net.bus_index(ln.from);
    const int ti = net.bus_index(ln.to);
    lp.add_row({"ohm_hi:" + ln.id, -kInf, slack,
                {{lay.flow0 + l, 1.0},
                 {lay.ang0 + fi, ln.susceptance},
                 {lay.ang0 + ti, -ln.susceptance}}});
  }
  lay.ohm_lo0 = lp.num_rows();
  for (int l = 0; l < nl; ++l) {
    const Line& ln = net.lines[l];
    const double M = std::fabs(ln.susceptance) * 2.0 * thetaM;
    const double slack = st.line_on[l] ? 0.0 : M;
    const int fi = net.bus_index(ln.from);
    const int ti = net.bus_index(ln.to);
    lp.add_row({"ohm_lo:" + ln.id, -slack, kInf,
                {{lay.flow0 + l, 1.0},
                 {lay.ang0 + fi, ln.susceptance},
                 {lay.ang0 + ti, -ln.susceptance}}});
  }

  // Optional per-line angle-difference limit, relaxed to the global box
  // bound when the line is off.
  lay.ad_row.assign(nl, -1);
  for (int l = 0; l < nl; ++l) {
    const Line& ln = net.lines[l];
    if (!ln.angle_diff_max_rad) continue;
    const double a = st.line_on[l] ? *ln.angle_diff_max_rad : thetaM;
    const int fi = net.bus_index(ln.from);
    const int ti = net.bus_index(ln.to);
    lay.ad_row[l] = lp.num_rows();
    lp.add_row({"adiff_hi:" + ln.id, -kInf, a,
                {{lay.ang0 + fi, 1.0}, {lay.ang0 + ti, -1.0}}});
    lp.add_row({"adiff_lo:" + ln.id, -a, kInf,
                {{lay.ang0 + fi, 1.0}, {lay.ang0 + ti, -1.0}}});
  }

  if (layout_out) *layout_out = lay;
  return lp;
}

}  // namespace detail

inline LinearProgram build_inner_lp(const Network& net, const Scenario& sc,
                                    const InterdictionPlan& plan) {
  return detail::build_inner_lp_impl(net, effective_status(net, sc, plan),
                                     nullptr);
}

// The defender's optimal reaction to (scenario, attack): dispatch, flows,
// angles, shed fractions, and the dual values of every constraint group.
// Duals are reported for the per-unit internal model with the orientation
// used by the companion dual formulation (all nonnegative except balance).
struct DispatchSolution {
  double shed_total_mw = 0.0;
  std::map<std::string, double> shed_frac;  // bus -> l_b in [0,1]
  std::map<std::string, double> gen_mw;     // generator -> output
  std::map<std::string, double> flow_mw;    // line -> signed flow variable
  std::map<std::string, double> angle_rad;  // bus -> angle
  struct Duals {
    std::map<std::string, double> balance;      // bus (free sign)
    std::map<std::string, double> gen_cap;      // generator, >= 0
    std::map<std::string, double> flow_cap_hi;  // line, >= 0
    std::map<std::string, double> flow_cap_lo;  // line, >= 0
    std::map<std::string, double> ohm_hi;       // line, >= 0
    std::map<std::string, double> ohm_lo;       // line, >= 0
    std::map<std::string, double> shed_cap;     // bus, >= 0
  } duals;
};

inline DispatchSolution solve_inner(const Network& net, const Scenario& sc,
                                    const InterdictionPlan& plan,
                                    const LpOptions& lp_opts = {}) {
  const EffectiveStatus st = effective_status(net, sc, plan);
  detail::InnerLayout lay;
  const LinearProgram lp = detail::build_inner_lp_impl(net, st, &lay);
  LpSolution sol = solve_lp(lp, lp_opts);
  if (sol.status == LpSolution::Status::iter_limit)
    throw SolverError("load-shed LP hit the iteration limit");
  if (sol.status != LpSolution::Status::optimal)
    throw SolverError("load-shed LP unexpectedly not optimal");

  const double base = net.base_mva;
  const int nb = static_cast<int>(net.buses.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());

  DispatchSolution out;
  out.shed_total_mw = sol.objective * base;
  for (int b = 0; b < nb; ++b) {
    const std::string& id = net.buses[b].id;
    out.shed_frac[id] = std::clamp(sol.x[lay.shed0 + b], 0.0, 1.0);
    out.angle_rad[id] = sol.x[lay.ang0 + b];
    out.duals.balance[id] = -sol.row_dual[lay.bal0 + b];
    out.duals.shed_cap[id] = std::max(0.0, -sol.reduced_cost[lay.shed0 + b]);
  }
  for (int g = 0; g < ng; ++g) {
    const std::string& id = net.generators[g].id;
    out.gen_mw[id] = st.gen_on[g] ? std::max(0.0, sol.x[lay.gen0 + g] * base)
                                  : 0.0;
    out.duals.gen_cap[id] = std::max(0.0, -sol.reduced_cost[lay.gen0 + g]);
  }
  for (int l = 0; l < nl; ++l) {
    const std::string& id = net.lines[l].id;
    out.flow_mw[id] = st.line_on[l] ? sol.x[lay.flow0 + l] * base : 0.0;
    out.duals.flow_cap_hi[id] =
        std::max(0.0, -sol.reduced_cost[lay.flow0 + l]);
    out.duals.flow_cap_lo[id] = std::max(0.0, sol.reduced_cost[lay.flow0 + l]);
    out.duals.ohm_hi[id] = std::max(0.0, -sol.row_dual[lay.ohm_hi0 + l]);
    out.duals.ohm_lo[id] = std::max(0.0, sol.row_dual[lay.ohm_lo0 + l]);
  }
  return out;
}

// Probability-weighted shed over the scenario set. Per-scenario solves are
// independent; n_threads > 1 runs them concurrently with a deterministic
// (serial, in-order) reduction.
inline double expected_shed(const Network& net, const ScenarioSet& ss,
                            const InterdictionPlan& plan, int n_threads = 1) {
  const long n = static_cast<long>(ss.scenarios.size());
  std::vector<double> shed(n, 0.0);
  parallel_for(n, n_threads, [&](long i) {
    shed[i] = solve_inner(net, ss.scenarios[i], plan).shed_total_mw;
  });
  double total = 0.0;
  for (long i = 0; i < n; ++i) total += ss.scenarios[i].weight * shed[i];
  return total;
}

}  // namespace gridnk
