// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/loadshed.hpp"
#include "gridnk/lp.hpp"
#include "gridnk/mip.hpp"
#include "gridnk/network.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/threads.hpp"

namespace gridnk {

// One heuristic optimality cut for a single scenario, generated from the
// dispatch solved at a particular attack plan:
//   eta_s <= constant + sum_lines alpha * x + sum_gens beta * y
// alpha = |line flow| for lines on in the scenario and not attacked in the
// generating plan (0 otherwise); beta = generator dispatch likewise. The
// maps store only nonzero-eligible components, so absent keys read as the
// zero the case split prescribes. These cuts are a time/quality trade-off:
// they are exact at their generating plan but not valid upper bounds for
// every other plan, which is why the loop below reports both bounds and
// callers cross-check desk-scale runs against enumeration.
struct Cut {
  std::string scenario;
  double constant = 0.0;                    // shed at the generating plan, MW
  std::map<std::string, double> line_coeff;  // line id -> alpha >= 0
  std::map<std::string, double> gen_coeff;   // generator id -> beta >= 0
};

// The cut's bound evaluated at a plan: constant plus the coefficients of
// the attacked components.
inline double cut_bound_at(const Cut& cut, const InterdictionPlan& plan) {
  double v = cut.constant;
  for (const std::string& id : plan.attacked_lines) {
    auto it = cut.line_coeff.find(id);
    if (it != cut.line_coeff.end()) v += it->second;
  }
  for (const std::string& id : plan.attacked_gens) {
    auto it = cut.gen_coeff.find(id);
    if (it != cut.gen_coeff.end()) v += it->second;
  }
  return v;
}

inline Cut make_cut(const Network& net, const Scenario& sc,
                    const InterdictionPlan& plan,
                    const DispatchSolution& disp) {
  const EffectiveStatus st = effective_status(net, sc, plan);
  Cut cut;
  cut.scenario = sc.id;
  cut.constant = disp.shed_total_mw;
  for (std::size_t l = 0; l < net.lines.size(); ++l)
    if (st.line_on[l])
      cut.line_coeff[net.lines[l].id] =
          std::fabs(disp.flow_mw.at(net.lines[l].id));
  for (std::size_t g = 0; g < net.generators.size(); ++g)
    if (st.gen_on[g])
      cut.gen_coeff[net.generators[g].id] =
          disp.gen_mw.at(net.generators[g].id);
  // Components attacked in the generating plan are off in st already, so
  // their coefficients are absent; the cut is tight at that plan.
  return cut;
}

// Attacker master problem: pick at most k components maximizing the
// weighted per-scenario shed estimates, each estimate capped by the total
// demand and by every accumulated cut for that scenario.
inline MipProblem build_master(const Network& net, int k,
                               const std::vector<Cut>& cuts,
                               const ScenarioSet& ss) {
  if (k < 0) throw ConfigError("master: k must be nonnegative");
  const double D = total_demand(net);
  MipProblem m;
  LinearProgram& lp = m.lp;
  lp.sense = LinearProgram::Sense::maximize;
  std::map<std::string, int> x_of, y_of, eta_of;
  for (const Line& l : net.lines) {
    x_of[l.id] = lp.add_var("x:" + l.id, 0.0, 1.0);
    m.binaries.push_back(x_of[l.id]);
  }
  for (const Generator& g : net.generators) {
    y_of[g.id] = lp.add_var("y:" + g.id, 0.0, 1.0);
    m.binaries.push_back(y_of[g.id]);
  }
  for (const Scenario& sc : ss.scenarios)
    eta_of[sc.id] = lp.add_var("eta:" + sc.id, 0.0, D, sc.weight);

  LpRow budget{"budget", -kInf, static_cast<double>(k), {}};
  for (int j : m.binaries) budget.terms.push_back({j, 1.0});
  lp.add_row(std::move(budget));

  int n = 0;
  for (const Cut& cut : cuts) {
    auto eit = eta_of.find(cut.scenario);
    if (eit == eta_of.end())
      throw ConfigError("master: cut references unknown scenario " +
                        cut.scenario);
    LpRow row{"cut:" + std::to_string(++n), -kInf, cut.constant, {}};
    row.terms.push_back({eit->second, 1.0});
    for (const auto& [id, alpha] : cut.line_coeff) {
      if (alpha == 0.0) continue;
      auto it = x_of.find(id);
      if (it == x_of.end())
        throw ConfigError("master: cut references unknown line " + id);
      row.terms.push_back({it->second, -alpha});
    }
    for (const auto& [id, beta] : cut.gen_coeff) {
      if (beta == 0.0) continue;
      auto it = y_of.find(id);
      if (it == y_of.end())
        throw ConfigError("master: cut references unknown generator " + id);
      row.terms.push_back({it->second, -beta});
    }
    lp.add_row(std::move(row));
  }
  return m;
}

struct CutPlaneHistoryEntry {
  int iter = 0;            // 1-based iteration number
  double z_lb = 0.0;       // incumbent true expected shed so far, MW
  double z_ub = 0.0;       // this iteration's master objective (raw)
  double z_ub_min = 0.0;   // running minimum of the raw trace
  InterdictionPlan evaluated;  // plan whose inner solves produced the cuts
  InterdictionPlan proposed;   // plan the master proposes next
  double wall_ms = 0.0;    // wall-clock time of this iteration
};

struct MasterState {
  int iteration = 0;
  double z_lb = -kInf;
  double z_ub = kInf;  // final raw master objective
  InterdictionPlan incumbent;
  std::vector<Cut> cuts;  // accumulated, never dropped
  std::vector<CutPlaneHistoryEntry> history;
};

struct CutPlaneOptions {
  double eps = 1e-4;      // relative gap target: z_ub - z_lb <= eps * z_lb
  int iter_limit = 200;
  InterdictionPlan init_plan;  // first evaluated attack
  int n_threads = 1;      // inner solves within an iteration
  MipOptions mip;         // master solver controls
  LpOptions lp;           // inner solver controls
};

struct CutPlaneResult {
  // converged: gap closed under eps. iter_limit: budget exhausted, best
  // incumbent returned. stalled: the master re-proposed a visited plan with
  // an unchanged objective, so further iterations cannot add information.
  enum class Status { converged, iter_limit, stalled };
  Status status = Status::converged;
  MasterState state;
};

// Alternates inner evaluations (true expected shed of the current plan,
// one LP per scenario, parallelizable) with master re-solves over all
// accumulated cuts. z_lb only ever reports exactly-evaluated plans and is
// non-decreasing; z_ub is the raw master trace (the running minimum is
// reported alongside, since the heuristic cuts can make the raw trace
// non-monotone and even dip below the exact optimum).
inline CutPlaneResult run_cutting_plane(const Network& net,
                                        const ScenarioSet& ss, int k,
                                        const CutPlaneOptions& opts = {}) {
  using clock = std::chrono::steady_clock;
  if (!(opts.eps > 0.0)) throw ConfigError("cutting plane: eps must be > 0");
  if (opts.iter_limit < 1)
    throw ConfigError("cutting plane: iter_limit must be >= 1");
  if (k < 0) throw ConfigError("cutting plane: k must be nonnegative");
  validate_scenarios(ss, net);
  {
    double w = 0.0;
    for (const Scenario& sc : ss.scenarios) w += sc.weight;
    if (std::fabs(w - 1.0) > 1e-6)
      throw ConfigError("cutting plane: scenario weights must be normalized");
  }
  validate_plan(opts.init_plan, net);

  auto plan_key = [](const InterdictionPlan& p) {
    std::vector<std::string> ls = p.attacked_lines, gs = p.attacked_gens;
    std::sort(ls.begin(), ls.end());
    std::sort(gs.begin(), gs.end());
    std::string key = "L";
    for (const auto& s : ls) key += "|" + s;
    key += "#G";
    for (const auto& s : gs) key += "|" + s;
    return key;
  };

  CutPlaneResult out;
  MasterState& st = out.state;
  InterdictionPlan plan = opts.init_plan;
  std::set<std::string> visited;
  const long nsc = static_cast<long>(ss.scenarios.size());
  double prev_z_ub = kInf;
  double z_ub_min = kInf;

  for (int iter = 1; iter <= opts.iter_limit; ++iter) {
    const auto tic = clock::now();
    st.iteration = iter;
    visited.insert(plan_key(plan));

    // True evaluation of the current plan: one inner LP per scenario.
    std::vector<DispatchSolution> disp(nsc);
    parallel_for(nsc, opts.n_threads, [&](long i) {
      disp[i] = solve_inner(net, ss.scenarios[i], plan, opts.lp);
    });
    double value = 0.0;
    for (long i = 0; i < nsc; ++i)
      value += ss.scenarios[i].weight * disp[i].shed_total_mw;
    if (value > st.z_lb) {
      st.z_lb = value;
      st.incumbent = plan;
    }
    for (long i = 0; i < nsc; ++i)
      st.cuts.push_back(make_cut(net, ss.scenarios[i], plan, disp[i]));

    // Master re-solve over all cuts; its bound is the valid upper value
    // even if the branch-and-bound stopped on a limit.
    const MipProblem master = build_master(net, k, st.cuts, ss);
    const MipSolution msol = solve_milp(master, opts.mip);
    if (!msol.has_incumbent)
      throw SolverError("cutting plane: master solve produced no incumbent");
    st.z_ub = std::max(msol.objective, msol.bound);
    z_ub_min = std::min(z_ub_min, st.z_ub);

    InterdictionPlan next;
    {
      int j = 0;  // master columns are lines then generators, network order
      for (const Line& l : net.lines)
        if (msol.x[j++] > 0.5) next.attacked_lines.push_back(l.id);
      for (const Generator& g : net.generators)
        if (msol.x[j++] > 0.5) next.attacked_gens.push_back(g.id);
    }

    CutPlaneHistoryEntry h;
    h.iter = iter;
    h.z_lb = st.z_lb;
    h.z_ub = st.z_ub;
    h.z_ub_min = z_ub_min;
    h.evaluated = plan;
    h.proposed = next;
    h.wall_ms = std::chrono::duration<double, std::milli>(clock::now() - tic)
                    .count();
    st.history.push_back(std::move(h));

    if (st.z_ub - st.z_lb <= opts.eps * st.z_lb) {
      out.status = CutPlaneResult::Status::converged;
      return out;
    }
    const bool revisit = visited.count(plan_key(next)) > 0;
    const bool unchanged =
        std::fabs(st.z_ub - prev_z_ub) <= 1e-9 * (1.0 + std::fabs(st.z_ub));
    if (revisit && unchanged) {
      out.status = CutPlaneResult::Status::stalled;
      return out;
    }
    prev_z_ub = st.z_ub;
    plan = std::move(next);
  }
  out.status = CutPlaneResult::Status::iter_limit;
  return out;
}

}  // namespace gridnk
