// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/loadshed.hpp"
#include "gridnk/lp.hpp"
#include "gridnk/mip.hpp"
#include "gridnk/network.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/simplex.hpp"

namespace gridnk {

// Policy for the boxes placed on dual variables: the McCormick construction
// needs finite envelopes, and tight analytical bounds are an open problem.
//   fixed_cap: every multiplier capped by the total demand D (pi in [-D, D],
//              lifted pairs by 2D) -- the assumed-valid default.
//   probe_lp : per-variable LPs maximize each multiplier over the dual
//              feasibility rows intersected with the fixed caps; results are
//              never looser than fixed_cap and sometimes strictly tighter.
// Either way the caps are an assumption, so the solver audits optima for
// multipliers sitting on a cap and flags them (see solve_single_level).
enum class DualBoundPolicy { fixed_cap, probe_lp };

struct DualBound {
  double lo = 0.0;
  double hi = 0.0;
  std::string source;  // "fixed_cap" | "probe" | "probe_fallback"
};

struct DualBoundReport {
  DualBoundPolicy policy = DualBoundPolicy::fixed_cap;
  double d_tot = 0.0;  // total demand, MW: the cap scale
  std::map<std::string, DualBound> bound;  // dual-variable name -> interval
  std::vector<std::string> notes;          // probe fallbacks, if any
};

// Column/row offsets of one dual load-shed LP (one scenario).
struct DualLayout {
  int pi0 = 0;    // per bus, free: balance multiplier
  int phi0 = 0;   // per generator, >= 0: capacity multiplier
  int gamp0 = 0;  // per line, >= 0: thermal upper multiplier
  int gamm0 = 0;  // per line, >= 0: thermal lower multiplier
  int delp0 = 0;  // per line, >= 0: Ohm upper multiplier
  int delm0 = 0;  // per line, >= 0: Ohm lower multiplier
  int om0 = 0;    // per bus, >= 0: shed-cap multiplier
  int taup0 = 0;  // per bus, >= 0: angle-box upper multiplier
  int taum0 = 0;  // per bus, >= 0: angle-box lower multiplier
  std::vector<int> rhop;  // per line: angle-diff upper multiplier (-1 if
                          // the line declares no limit); lower is +1
  int row_flow0 = 0;  // per line: stationarity of the flow variable
  int row_ang0 = 0;   // per bus: stationarity of the angle variable
  int row_gen0 = 0;   // per generator: stationarity of the dispatch variable
  int row_shed0 = 0;  // per bus: stationarity of the shed variable
};

struct DualModel {
  LinearProgram lp;  // maximization; optimum == primal shed (MW)
  DualLayout lay;
};

namespace detail {

inline double line_big_m_mw(const Network& net, const Line& ln) {
  // Mirror of the primal relaxation constant, in MW: with every angle inside
  // the global box, |B (theta_i - theta_j)| never exceeds |B| * 2 * thetaM.
  return std::fabs(ln.susceptance) * net.base_mva * 2.0 * net.angle_bound_rad;
}

inline void validate_scenario_refs(const Scenario& sc, const Network& net) {
  for (const std::string& id : sc.off_lines)
    if (net.line_index(id) < 0)
      throw ConfigError("scenario " + sc.id + " references missing line " +
                        id);
  for (const std::string& id : sc.off_gens)
    if (net.generator_index(id) < 0)
      throw ConfigError("scenario " + sc.id + " references missing generator " +
                        id);
}

}  // namespace detail

// Dual of the per-scenario load-shed LP for a fixed attack, in MW units.
// Its optimum equals solve_inner(...).shed_total_mw exactly (strong duality).
// Variable stationarity rows, one per primal variable:
//   flow p:   pi_from - pi_to + gamp - gamm + delp - delm = 0
//   angle th: sum_{from=b} B (delp - delm) - sum_{to=b} B (delp - delm)
//               + taup_b - taum_b + [same +/- pattern for rho] = 0
//   gen pg:   -pi_bus - phi <= 0
//   shed l:   -d pi - om <= d
// Objective: max sum_b (-d pi - om) - sum_g cap phi - sum_l T (gamp + gamm)
//            - sum_l Mbar (delp + delm) - thetaM sum_{non-ref} (taup + taum)
//            - sum_l A (rhop + rhom)
// with cap/T/Mbar/A the effective (availability-dependent) primal constants.
inline DualModel build_dual_lp(const Network& net, const Scenario& sc,
                               const InterdictionPlan& plan) {
  detail::validate_scenario_refs(sc, net);
  validate_plan(plan, net);

  const int nb = static_cast<int>(net.buses.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());
  const double base = net.base_mva;
  const double thetaM = net.angle_bound_rad;
  const EffectiveStatus st = effective_status(net, sc, plan);
  const std::vector<char> is_ref = detail::reference_buses(net, st);

  DualModel m;
  LinearProgram& lp = m.lp;
  DualLayout& lay = m.lay;
  lp.sense = LinearProgram::Sense::maximize;

  lay.pi0 = lp.num_vars();
  for (int b = 0; b < nb; ++b)
    lp.add_var("pi:" + net.buses[b].id, -kInf, kInf, -net.buses[b].demand_mw);
  lay.phi0 = lp.num_vars();
  for (int g = 0; g < ng; ++g) {
    const double cap = st.gen_on[g] ? net.generators[g].pmax_mw : 0.0;
    lp.add_var("phi:" + net.generators[g].id, 0.0, kInf, -cap);
  }
  lay.gamp0 = lp.num_vars();
  for (int l = 0; l < nl; ++l)
    lp.add_var("gamp:" + net.lines[l].id, 0.0, kInf,
               st.line_on[l] ? -net.lines[l].thermal_mw : 0.0);
  lay.gamm0 = lp.num_vars();
  for (int l = 0; l < nl; ++l)
    lp.add_var("gamm:" + net.lines[l].id, 0.0, kInf,
               st.line_on[l] ? -net.lines[l].thermal_mw : 0.0);
  lay.delp0 = lp.num_vars();
  for (int l = 0; l < nl; ++l)
    lp.add_var("delp:" + net.lines[l].id, 0.0, kInf,
               st.line_on[l] ? 0.0 : -detail::line_big_m_mw(net, net.lines[l]));
  lay.delm0 = lp.num_vars();
  for (int l = 0; l < nl; ++l)
    lp.add_var("delm:" + net.lines[l].id, 0.0, kInf,
               st.line_on[l] ? 0.0 : -detail::line_big_m_mw(net, net.lines[l]));
  lay.om0 = lp.num_vars();
  for (int b = 0; b < nb; ++b)
    lp.add_var("om:" + net.buses[b].id, 0.0, kInf, -1.0);
  lay.taup0 = lp.num_vars();
  for (int b = 0; b < nb; ++b)
    lp.add_var("taup:" + net.buses[b].id, 0.0, kInf, is_ref[b] ? 0.0 : -thetaM);
  lay.taum0 = lp.num_vars();
  for (int b = 0; b < nb; ++b)
    lp.add_var("taum:" + net.buses[b].id, 0.0, kInf, is_ref[b] ? 0.0 : -thetaM);
  lay.rhop.assign(nl, -1);
  for (int l = 0; l < nl; ++l) {
    const Line& ln = net.lines[l];
    if (!ln.angle_diff_max_rad) continue;
    const double a = st.line_on[l] ? *ln.angle_diff_max_rad : thetaM;
    lay.rhop[l] = lp.add_var("rhop:" + ln.id, 0.0, kInf, -a);
    lp.add_var("rhom:" + ln.id, 0.0, kInf, -a);
  }

  lay.row_flow0 = lp.num_rows();
  for (int l = 0; l < nl; ++l) {
    const Line& ln = net.lines[l];
    lp.add_row({"dflow:" + ln.id, 0.0, 0.0,
                {{lay.pi0 + net.bus_index(ln.from), 1.0},
                 {lay.pi0 + net.bus_index(ln.to), -1.0},
                 {lay.gamp0 + l, 1.0},
                 {lay.gamm0 + l, -1.0},
                 {lay.delp0 + l, 1.0},
                 {lay.delm0 + l, -1.0}}});
  }
  lay.row_ang0 = lp.num_rows();
  {
    std::vector<LpRow> rows(nb);
    for (int b = 0; b < nb; ++b) {
      rows[b].name = "dang:" + net.buses[b].id;
      rows[b].lo = rows[b].hi = 0.0;
      rows[b].terms.push_back({lay.taup0 + b, 1.0});
      rows[b].terms.push_back({lay.taum0 + b, -1.0});
    }
    for (int l = 0; l < nl; ++l) {
      const Line& ln = net.lines[l];
      const double B = ln.susceptance * base;
      const int fi = net.bus_index(ln.from);
      const int ti = net.bus_index(ln.to);
      rows[fi].terms.push_back({lay.delp0 + l, B});
      rows[fi].terms.push_back({lay.delm0 + l, -B});
      rows[ti].terms.push_back({lay.delp0 + l, -B});
      rows[ti].terms.push_back({lay.delm0 + l, B});
      if (lay.rhop[l] >= 0) {
        rows[fi].terms.push_back({lay.rhop[l], 1.0});
        rows[fi].terms.push_back({lay.rhop[l] + 1, -1.0});
        rows[ti].terms.push_back({lay.rhop[l], -1.0});
        rows[ti].terms.push_back({lay.rhop[l] + 1, 1.0});
      }
    }
    for (auto& r : rows) lp.add_row(std::move(r));
  }
  lay.row_gen0 = lp.num_rows();
  for (int g = 0; g < ng; ++g) {
    lp.add_row({"dgen:" + net.generators[g].id, -kInf, 0.0,
                {{lay.pi0 + net.bus_index(net.generators[g].bus), -1.0},
                 {lay.phi0 + g, -1.0}}});
  }
  lay.row_shed0 = lp.num_rows();
  for (int b = 0; b < nb; ++b) {
    const double d = net.buses[b].demand_mw;
    LpRow r{"dshed:" + net.buses[b].id, -kInf, d, {}};
    if (d != 0.0) r.terms.push_back({lay.pi0 + b, -d});
    r.terms.push_back({lay.om0 + b, -1.0});
    lp.add_row(std::move(r));
  }
  return m;
}

namespace detail {

inline void fill_fixed_caps(const Network& net, DualBoundReport& rep) {
  const double D = rep.d_tot;
  auto cap = [&](const std::string& name, double lo, double hi) {
    rep.bound[name] = DualBound{lo, hi, "fixed_cap"};
  };
  for (const Bus& b : net.buses) {
    cap("pi:" + b.id, -D, D);
    cap("om:" + b.id, 0.0, D);
  }
  for (const Generator& g : net.generators) cap("phi:" + g.id, 0.0, D);
  for (const Line& l : net.lines) {
    cap("gamp:" + l.id, 0.0, D);
    cap("gamm:" + l.id, 0.0, D);
    cap("delp:" + l.id, 0.0, D);
    cap("delm:" + l.id, 0.0, D);
    cap("gam:" + l.id, 0.0, 2.0 * D);  // lifted gamp + gamm
    cap("del:" + l.id, 0.0, 2.0 * D);  // lifted delp + delm
    if (l.angle_diff_max_rad) {
      cap("rhop:" + l.id, 0.0, D);
      cap("rhom:" + l.id, 0.0, D);
      cap("rho:" + l.id, 0.0, 2.0 * D);
    }
  }
}

}  // namespace detail

// Boxes for the dual variables of every scenario block. The feasibility rows
// of the dual do not depend on the scenario or the attack (availability only
// enters objectives), so one report serves the whole scenario set.
inline DualBoundReport compute_dual_bounds(const Network& net,
                                           const ScenarioSet& ss,
                                           DualBoundPolicy policy,
                                           const LpOptions& lp_opts = {}) {
  validate_scenarios(ss, net);
  DualBoundReport rep;
  rep.policy = policy;
  rep.d_tot = total_demand(net);
  detail::fill_fixed_caps(net, rep);
  if (policy == DualBoundPolicy::fixed_cap) return rep;

  // Probe: maximize each variable (minimize as well for the free pi) over
  // the dual feasibility rows intersected with the fixed caps. The caps make
  // every probe bounded; a non-optimal probe falls back to the cap.
  DualModel probe = build_dual_lp(net, Scenario{"probe", {}, {}, 1.0},
                                  InterdictionPlan{});
  LinearProgram& lp = probe.lp;
  for (double& c : lp.obj) c = 0.0;
  for (int j = 0; j < lp.num_vars(); ++j) {
    auto it = rep.bound.find(lp.var_name[j]);
    if (it == rep.bound.end()) continue;  // tau: box multipliers stay free
    lp.var_lo[j] = it->second.lo;
    lp.var_hi[j] = it->second.hi;
  }

  auto probe_one = [&](const std::string& name,
                       const std::vector<std::pair<int, double>>& objective,
                       bool upper) {
    for (const auto& [j, c] : objective) lp.obj[j] = upper ? c : -c;
    lp.sense = LinearProgram::Sense::maximize;
    LpSolution sol = solve_lp(lp, lp_opts);
    for (const auto& [j, c] : objective) lp.obj[j] = 0.0;
    DualBound& b = rep.bound[name];
    if (sol.status != LpSolution::Status::optimal) {
      b.source = "probe_fallback";
      rep.notes.push_back("probe for " + name + (upper ? " upper" : " lower") +
                          " did not solve; fixed cap retained");
      return;
    }
    if (upper)
      b.hi = std::min(b.hi, sol.objective);
    else
      b.lo = std::max(b.lo, -sol.objective);
    if (b.source != "probe_fallback") b.source = "probe";
  };

  const DualLayout& lay = probe.lay;
  const int nb = static_cast<int>(net.buses.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());
  for (int b = 0; b < nb; ++b) {
    probe_one("pi:" + net.buses[b].id, {{lay.pi0 + b, 1.0}}, true);
    probe_one("pi:" + net.buses[b].id, {{lay.pi0 + b, 1.0}}, false);
    probe_one("om:" + net.buses[b].id, {{lay.om0 + b, 1.0}}, true);
  }
  for (int g = 0; g < ng; ++g)
    probe_one("phi:" + net.generators[g].id, {{lay.phi0 + g, 1.0}}, true);
  for (int l = 0; l < nl; ++l) {
    const std::string& id = net.lines[l].id;
    probe_one("gamp:" + id, {{lay.gamp0 + l, 1.0}}, true);
    probe_one("gamm:" + id, {{lay.gamm0 + l, 1.0}}, true);
    probe_one("delp:" + id, {{lay.delp0 + l, 1.0}}, true);
    probe_one("delm:" + id, {{lay.delm0 + l, 1.0}}, true);
    probe_one("gam:" + id, {{lay.gamp0 + l, 1.0}, {lay.gamm0 + l, 1.0}}, true);
    probe_one("del:" + id, {{lay.delp0 + l, 1.0}, {lay.delm0 + l, 1.0}}, true);
    if (lay.rhop[l] >= 0) {
      probe_one("rhop:" + id, {{lay.rhop[l], 1.0}}, true);
      probe_one("rhom:" + id, {{lay.rhop[l] + 1, 1.0}}, true);
      probe_one("rho:" + id, {{lay.rhop[l], 1.0}, {lay.rhop[l] + 1, 1.0}},
                true);
    }
  }
  return rep;
}

// Column offsets of one scenario block inside the single-level MILP.
// Trimmed members are -1: product columns exist only where the linked
// availability coefficient is nonzero.
struct F3ScenarioBlock {
  DualLayout dual;          // the plain dual columns/rows of this block
  std::vector<int> gaml;    // per line: lifted gamp+gamm (scenario-on lines)
  std::vector<int> dell;    // per line: lifted delp+delm (always present)
  std::vector<int> rhol;    // per line: lifted rhop+rhom (angle-diff lines)
  std::vector<int> sphi;    // per generator: y * phi
  std::vector<int> sgam;    // per line: x * gam
  std::vector<int> sdel;    // per line: x * del
  std::vector<int> srho;    // per line: x * rho
  int eta = -1;
};

struct SingleLevelModel {
  MipProblem mip;           // maximization; optimum == expected shed (MW)
  std::vector<int> x;       // per line: attack binaries (network order)
  std::vector<int> y;       // per generator: attack binaries
  std::vector<F3ScenarioBlock> block;  // per scenario
  DualBoundReport bounds;
};

// One MILP over the attack binaries and all per-scenario dual blocks:
//   max sum_s w_s eta_s
//   s.t. budget row; per scenario: dual feasibility rows, lifted-variable
//        definitions, McCormick rows for the binary-continuous products
//        (y*phi, x*gam, x*del, x*rho), and the strong-duality link equating
//        eta_s to the dual objective expression with products linearized.
// Reference buses for the angle-box terms are taken from each scenario's own
// on-line graph (the attack cannot re-pin them); this matters only if an
// angle box binds at the optimum, which the audit in solve_single_level
// reports.
inline SingleLevelModel build_single_level_milp(
    const Network& net, const ScenarioSet& ss, int k,
    DualBoundPolicy policy = DualBoundPolicy::fixed_cap,
    const LpOptions& probe_opts = {}) {
  if (k < 0) throw ConfigError("single-level: k must be nonnegative");
  validate_scenarios(ss, net);
  {
    double w = 0.0;
    for (const Scenario& sc : ss.scenarios) w += sc.weight;
    if (std::fabs(w - 1.0) > 1e-6)
      throw ConfigError("single-level: scenario weights must be normalized");
  }

  const int nb = static_cast<int>(net.buses.size());
  const int ng = static_cast<int>(net.generators.size());
  const int nl = static_cast<int>(net.lines.size());
  const double base = net.base_mva;
  const double thetaM = net.angle_bound_rad;
  const double D = total_demand(net);

  SingleLevelModel m;
  m.bounds = compute_dual_bounds(net, ss, policy, probe_opts);
  LinearProgram& lp = m.mip.lp;
  lp.sense = LinearProgram::Sense::maximize;

  auto bound_hi = [&](const std::string& name) {
    auto it = m.bounds.bound.find(name);
    if (it == m.bounds.bound.end() || !is_finite(it->second.hi))
      throw ConfigError("single-level: no finite bound for " + name);
    return it->second.hi;
  };

  for (const Line& l : net.lines)
    m.x.push_back(lp.add_var("x:" + l.id, 0.0, 1.0));
  for (const Generator& g : net.generators)
    m.y.push_back(lp.add_var("y:" + g.id, 0.0, 1.0));
  m.mip.binaries = m.x;
  m.mip.binaries.insert(m.mip.binaries.end(), m.y.begin(), m.y.end());
  {
    LpRow budget{"budget", -kInf, static_cast<double>(k), {}};
    for (int j : m.mip.binaries) budget.terms.push_back({j, 1.0});
    lp.add_row(std::move(budget));
  }

  for (const Scenario& sc : ss.scenarios) {
    const std::string tag = "@" + sc.id;
    const EffectiveStatus st =
        effective_status(net, sc, InterdictionPlan{});  // scenario-only
    const std::vector<char> is_ref = detail::reference_buses(net, st);

    F3ScenarioBlock blk;
    DualLayout& lay = blk.dual;

    // Dual columns. Boxes come from the bound report; tau stays unboxed
    // (it is not in any product, and the eta link keeps it from drifting).
    lay.pi0 = lp.num_vars();
    for (int b = 0; b < nb; ++b) {
      const DualBound& bd = m.bounds.bound.at("pi:" + net.buses[b].id);
      lp.add_var("pi:" + net.buses[b].id + tag, bd.lo, bd.hi);
    }
    lay.phi0 = lp.num_vars();
    for (int g = 0; g < ng; ++g)
      lp.add_var("phi:" + net.generators[g].id + tag, 0.0,
                 bound_hi("phi:" + net.generators[g].id));
    lay.gamp0 = lp.num_vars();
    for (int l = 0; l < nl; ++l)
      lp.add_var("gamp:" + net.lines[l].id + tag, 0.0,
                 bound_hi("gamp:" + net.lines[l].id));
    lay.gamm0 = lp.num_vars();
    for (int l = 0; l < nl; ++l)
      lp.add_var("gamm:" + net.lines[l].id + tag, 0.0,
                 bound_hi("gamm:" + net.lines[l].id));
    lay.delp0 = lp.num_vars();
    for (int l = 0; l < nl; ++l)
      lp.add_var("delp:" + net.lines[l].id + tag, 0.0,
                 bound_hi("delp:" + net.lines[l].id));
    lay.delm0 = lp.num_vars();
    for (int l = 0; l < nl; ++l)
      lp.add_var("delm:" + net.lines[l].id + tag, 0.0,
                 bound_hi("delm:" + net.lines[l].id));
    lay.om0 = lp.num_vars();
    for (int b = 0; b < nb; ++b)
      lp.add_var("om:" + net.buses[b].id + tag, 0.0,
                 bound_hi("om:" + net.buses[b].id));
    lay.taup0 = lp.num_vars();
    for (int b = 0; b < nb; ++b)
      lp.add_var("taup:" + net.buses[b].id + tag, 0.0, kInf);
    lay.taum0 = lp.num_vars();
    for (int b = 0; b < nb; ++b)
      lp.add_var("taum:" + net.buses[b].id + tag, 0.0, kInf);
    lay.rhop.assign(nl, -1);
    for (int l = 0; l < nl; ++l) {
      if (!net.lines[l].angle_diff_max_rad) continue;
      const std::string& id = net.lines[l].id;
      lay.rhop[l] = lp.add_var("rhop:" + id + tag, 0.0, bound_hi("rhop:" + id));
      lp.add_var("rhom:" + id + tag, 0.0, bound_hi("rhom:" + id));
    }

    // Lifted pair sums and the binary-continuous product columns.
    blk.gaml.assign(nl, -1);
    blk.dell.assign(nl, -1);
    blk.rhol.assign(nl, -1);
    blk.sgam.assign(nl, -1);
    blk.sdel.assign(nl, -1);
    blk.srho.assign(nl, -1);
    blk.sphi.assign(ng, -1);
    for (int l = 0; l < nl; ++l) {
      const std::string& id = net.lines[l].id;
      if (st.line_on[l])
        blk.gaml[l] = lp.add_var("gam:" + id + tag, 0.0, bound_hi("gam:" + id));
      blk.dell[l] = lp.add_var("del:" + id + tag, 0.0, bound_hi("del:" + id));
      if (net.lines[l].angle_diff_max_rad)
        blk.rhol[l] = lp.add_var("rho:" + id + tag, 0.0, bound_hi("rho:" + id));
      if (st.line_on[l]) {
        blk.sgam[l] =
            lp.add_var("sgam:" + id + tag, 0.0, bound_hi("gam:" + id));
        blk.sdel[l] =
            lp.add_var("sdel:" + id + tag, 0.0, bound_hi("del:" + id));
        if (net.lines[l].angle_diff_max_rad &&
            *net.lines[l].angle_diff_max_rad != thetaM)
          blk.srho[l] =
              lp.add_var("srho:" + id + tag, 0.0, bound_hi("rho:" + id));
      }
    }
    for (int g = 0; g < ng; ++g)
      if (st.gen_on[g] && net.generators[g].pmax_mw > 0.0)
        blk.sphi[g] = lp.add_var("sphi:" + net.generators[g].id + tag, 0.0,
                                 bound_hi("phi:" + net.generators[g].id));
    blk.eta = lp.add_var("eta" + tag, 0.0, D, sc.weight);

    // Dual feasibility rows (identical structure to build_dual_lp).
    lay.row_flow0 = lp.num_rows();
    for (int l = 0; l < nl; ++l) {
      const Line& ln = net.lines[l];
      lp.add_row({"dflow:" + ln.id + tag, 0.0, 0.0,
                  {{lay.pi0 + net.bus_index(ln.from), 1.0},
                   {lay.pi0 + net.bus_index(ln.to), -1.0},
                   {lay.gamp0 + l, 1.0},
                   {lay.gamm0 + l, -1.0},
                   {lay.delp0 + l, 1.0},
                   {lay.delm0 + l, -1.0}}});
    }
    lay.row_ang0 = lp.num_rows();
    {
      std::vector<LpRow> rows(nb);
      for (int b = 0; b < nb; ++b) {
        rows[b].name = "dang:" + net.buses[b].id + tag;
        rows[b].lo = rows[b].hi = 0.0;
        rows[b].terms.push_back({lay.taup0 + b, 1.0});
        rows[b].terms.push_back({lay.taum0 + b, -1.0});
      }
      for (int l = 0; l < nl; ++l) {
        const Line& ln = net.lines[l];
        const double B = ln.susceptance * base;
        const int fi = net.bus_index(ln.from);
        const int ti = net.bus_index(ln.to);
        rows[fi].terms.push_back({lay.delp0 + l, B});
        rows[fi].terms.push_back({lay.delm0 + l, -B});
        rows[ti].terms.push_back({lay.delp0 + l, -B});
        rows[ti].terms.push_back({lay.delm0 + l, B});
        if (lay.rhop[l] >= 0) {
          rows[fi].terms.push_back({lay.rhop[l], 1.0});
          rows[fi].terms.push_back({lay.rhop[l] + 1, -1.0});
          rows[ti].terms.push_back({lay.rhop[l], -1.0});
          rows[ti].terms.push_back({lay.rhop[l] + 1, 1.0});
        }
      }
      for (auto& r : rows) lp.add_row(std::move(r));
    }
    lay.row_gen0 = lp.num_rows();
    for (int g = 0; g < ng; ++g)
      lp.add_row({"dgen:" + net.generators[g].id + tag, -kInf, 0.0,
                  {{lay.pi0 + net.bus_index(net.generators[g].bus), -1.0},
                   {lay.phi0 + g, -1.0}}});
    lay.row_shed0 = lp.num_rows();
    for (int b = 0; b < nb; ++b) {
      const double d = net.buses[b].demand_mw;
      LpRow r{"dshed:" + net.buses[b].id + tag, -kInf, d, {}};
      if (d != 0.0) r.terms.push_back({lay.pi0 + b, -d});
      r.terms.push_back({lay.om0 + b, -1.0});
      lp.add_row(std::move(r));
    }

    // Lifted-variable definitions: lifted - plus - minus = 0.
    for (int l = 0; l < nl; ++l) {
      const std::string& id = net.lines[l].id;
      if (blk.gaml[l] >= 0)
        lp.add_row({"lift_gam:" + id + tag, 0.0, 0.0,
                    {{blk.gaml[l], 1.0},
                     {lay.gamp0 + l, -1.0},
                     {lay.gamm0 + l, -1.0}}});
      lp.add_row({"lift_del:" + id + tag, 0.0, 0.0,
                  {{blk.dell[l], 1.0},
                   {lay.delp0 + l, -1.0},
                   {lay.delm0 + l, -1.0}}});
      if (blk.rhol[l] >= 0)
        lp.add_row({"lift_rho:" + id + tag, 0.0, 0.0,
                    {{blk.rhol[l], 1.0},
                     {lay.rhop[l], -1.0},
                     {lay.rhop[l] + 1, -1.0}}});
    }

    // McCormick rows for sigma = binary * mu with mu in [0, U]; exact for
    // binary factors:  sigma <= U b;  sigma <= mu;  sigma >= mu - U (1 - b).
    auto mccormick = [&](const std::string& name, int sigma, int bin, int mu,
                         double U) {
      lp.add_row({"mc1_" + name, -kInf, 0.0, {{sigma, 1.0}, {bin, -U}}});
      lp.add_row({"mc2_" + name, -kInf, 0.0, {{sigma, 1.0}, {mu, -1.0}}});
      lp.add_row(
          {"mc3_" + name, -U, kInf, {{sigma, 1.0}, {mu, -1.0}, {bin, -U}}});
    };
    for (int g = 0; g < ng; ++g)
      if (blk.sphi[g] >= 0)
        mccormick("phi:" + net.generators[g].id + tag, blk.sphi[g], m.y[g],
                  lay.phi0 + g, bound_hi("phi:" + net.generators[g].id));
    for (int l = 0; l < nl; ++l) {
      const std::string& id = net.lines[l].id;
      if (blk.sgam[l] >= 0)
        mccormick("gam:" + id + tag, blk.sgam[l], m.x[l], blk.gaml[l],
                  bound_hi("gam:" + id));
      if (blk.sdel[l] >= 0)
        mccormick("del:" + id + tag, blk.sdel[l], m.x[l], blk.dell[l],
                  bound_hi("del:" + id));
      if (blk.srho[l] >= 0)
        mccormick("rho:" + id + tag, blk.srho[l], m.x[l], blk.rhol[l],
                  bound_hi("rho:" + id));
    }

    // Strong-duality link: eta_s minus the linearized dual objective = 0.
    {
      LpRow link{"eta_link" + tag, 0.0, 0.0, {}};
      link.terms.push_back({blk.eta, 1.0});
      for (int b = 0; b < nb; ++b) {
        const double d = net.buses[b].demand_mw;
        if (d != 0.0) link.terms.push_back({lay.pi0 + b, d});
        link.terms.push_back({lay.om0 + b, 1.0});
        if (!is_ref[b]) {
          link.terms.push_back({lay.taup0 + b, thetaM});
          link.terms.push_back({lay.taum0 + b, thetaM});
        }
      }
      for (int g = 0; g < ng; ++g) {
        if (blk.sphi[g] < 0) continue;  // off or zero-capacity generator
        const double c = net.generators[g].pmax_mw;
        link.terms.push_back({lay.phi0 + g, c});
        link.terms.push_back({blk.sphi[g], -c});
      }
      for (int l = 0; l < nl; ++l) {
        const Line& ln = net.lines[l];
        const double M = detail::line_big_m_mw(net, ln);
        if (st.line_on[l]) {
          link.terms.push_back({blk.gaml[l], ln.thermal_mw});
          link.terms.push_back({blk.sgam[l], -ln.thermal_mw});
          link.terms.push_back({blk.sdel[l], M});
          if (blk.rhol[l] >= 0) {
            link.terms.push_back({blk.rhol[l], *ln.angle_diff_max_rad});
            if (blk.srho[l] >= 0)
              link.terms.push_back(
                  {blk.srho[l], thetaM - *ln.angle_diff_max_rad});
          }
        } else {
          link.terms.push_back({blk.dell[l], M});
          if (blk.rhol[l] >= 0) link.terms.push_back({blk.rhol[l], thetaM});
        }
      }
      lp.add_row(std::move(link));
    }
    m.block.push_back(std::move(blk));
  }
  return m;
}

struct SingleLevelSolution {
  MipSolution milp;
  InterdictionPlan plan;
  double objective = 0.0;  // expected shed of the chosen plan, MW
  std::vector<double> eta;  // per-scenario dual objective values
  std::vector<std::string> warnings;  // dual variables found at their caps
};

// Build, solve, extract the plan, and audit the bound assumption: any dual
// variable at its cap (or an active angle-box multiplier) means the caps may
// have clipped the true optimum; callers should cross-check such solutions
// against the enumeration oracle.
inline SingleLevelSolution solve_single_level(
    const Network& net, const ScenarioSet& ss, int k,
    DualBoundPolicy policy = DualBoundPolicy::fixed_cap,
    const MipOptions& opts = {}) {
  SingleLevelModel model = build_single_level_milp(net, ss, k, policy, opts.lp);
  SingleLevelSolution out;
  out.milp = solve_milp(model.mip, opts);
  if (!out.milp.has_incumbent)
    throw SolverError("single-level MILP ended without an incumbent");
  out.objective = out.milp.objective;

  const std::vector<double>& xv = out.milp.x;
  for (std::size_t l = 0; l < net.lines.size(); ++l)
    if (xv[model.x[l]] > 0.5)
      out.plan.attacked_lines.push_back(net.lines[l].id);
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    if (xv[model.y[g]] > 0.5) out.plan.attacked_gens.push_back(net.generators[g].id);

  const LinearProgram& lp = model.mip.lp;
  for (std::size_t s = 0; s < model.block.size(); ++s) {
    const F3ScenarioBlock& blk = model.block[s];
    out.eta.push_back(xv[blk.eta]);
    const int lo = blk.dual.pi0;
    const int hi_end = blk.eta;  // columns of this block precede its eta
    for (int j = lo; j < hi_end; ++j) {
      const double v = xv[j];
      const double tol = 1e-6 * (1.0 + std::fabs(lp.var_hi[j]));
      const bool at_hi = is_finite(lp.var_hi[j]) && lp.var_hi[j] > 0.0 &&
                         v >= lp.var_hi[j] - tol;
      const bool at_lo = is_finite(lp.var_lo[j]) && lp.var_lo[j] < 0.0 &&
                         v <= lp.var_lo[j] + tol;
      const bool tau_active =
          !is_finite(lp.var_hi[j]) && v > 1e-6;  // angle-box multiplier
      if (at_hi || at_lo)
        out.warnings.push_back(lp.var_name[j] + " at dual cap " +
                               std::to_string(at_hi ? lp.var_hi[j]
                                                    : lp.var_lo[j]));
      else if (tau_active)
        out.warnings.push_back(lp.var_name[j] +
                               " active (angle box binding)");
    }
  }
  return out;
}

}  // namespace gridnk
