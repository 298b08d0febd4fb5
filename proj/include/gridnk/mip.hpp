// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/lp.hpp"
#include "gridnk/simplex.hpp"

namespace gridnk {

struct MipOptions {
  double tol_int = 1e-6;        // integrality tolerance
  double rel_gap = 1e-6;        // relative bound gap accepted as solved
  long node_limit = 1000000;    // maximum LP relaxations solved
  LpOptions lp;
};

struct MipSolution {
  // optimal: bound gap closed (or within rel_gap with negligible residue).
  // gap_limit: stopped at the configured rel_gap with a recordable residual
  // gap; the incumbent is within that gap of the true optimum.
  enum class Status { optimal, infeasible, gap_limit, node_limit };

  Status status = Status::infeasible;
  bool has_incumbent = false;
  double objective = 0.0;  // incumbent value, original sense
  double bound = 0.0;      // proven bound on the true optimum, original sense
  std::vector<double> x;
  long nodes = 0;  // LP relaxations solved (root counts as 1)

  bool feasible() const { return has_incumbent; }
};

// Best-first branch and bound over {0,1} variables.
//  - node order: best parent bound first, ties by node id (creation order);
//  - branching variable: most fractional, ties by lowest variable index;
//  - no cuts, no presolve, no rounding heuristics: correctness and
//    determinism over speed. Relaxations are solved cold by solve_lp.
inline MipSolution solve_milp(const MipProblem& prob,
                              const MipOptions& opts = {}) {
  LinearProgram lp = prob.lp;  // working copy; node fixings mutate bounds
  lp.validate();
  const bool flip = lp.sense == LinearProgram::Sense::maximize;
  if (flip) {
    lp.sense = LinearProgram::Sense::minimize;
    for (double& c : lp.obj) c = -c;
    lp.obj_constant = -lp.obj_constant;
  }
  for (int j : prob.binaries) {
    if (j < 0 || j >= lp.num_vars())
      throw ConfigError("milp: binary index out of range");
    if (lp.var_lo[j] < -opts.tol_int || lp.var_hi[j] > 1.0 + opts.tol_int)
      throw ConfigError("milp: binary variable " + lp.var_name[j] +
                        " must have bounds within [0,1]");
  }

  struct Node {
    double bound;  // parent LP value (min form); -inf for the root
    long id;
    std::vector<std::pair<int, double>> fixings;
  };
  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.bound != b.bound) return a.bound > b.bound;  // smaller bound first
      return a.id > b.id;
    }
  };
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push(Node{-kInf, 0, {}});
  long next_id = 1;

  double inc_obj = kInf;
  std::vector<double> inc_x;
  bool have_inc = false;
  long nodes = 0;

  MipSolution out;
  auto finish = [&](MipSolution::Status st, double bound_min_form) {
    out.status = st;
    out.has_incumbent = have_inc;
    out.nodes = nodes;
    if (have_inc) {
      out.objective = flip ? -inc_obj : inc_obj;
      out.x = inc_x;
    }
    out.bound = flip ? -bound_min_form : bound_min_form;
    return out;
  };

  while (!open.empty()) {
    const double gap_abs = opts.rel_gap * std::max(1.0, std::fabs(inc_obj));
    const Node node = open.top();

    if (have_inc && node.bound >= inc_obj - gap_abs) {
      // Best remaining node cannot improve beyond the accepted gap.
      const double residual = inc_obj - node.bound;
      const bool negligible = residual <= 1e-9 * std::max(1.0, std::fabs(inc_obj));
      return finish(negligible ? MipSolution::Status::optimal
                               : MipSolution::Status::gap_limit,
                    std::min(inc_obj, node.bound));
    }
    open.pop();

    if (nodes >= opts.node_limit)
      return finish(MipSolution::Status::node_limit,
                    std::min(inc_obj, node.bound));

    for (const auto& [j, v] : node.fixings) {
      lp.var_lo[j] = v;
      lp.var_hi[j] = v;
    }
    LpSolution rel = solve_lp(lp, opts.lp);
    for (const auto& [j, v] : node.fixings) {
      lp.var_lo[j] = prob.lp.var_lo[j];
      lp.var_hi[j] = prob.lp.var_hi[j];
    }
    ++nodes;

    if (rel.status == LpSolution::Status::unbounded)
      throw SolverError("milp: unbounded relaxation");
    if (rel.status == LpSolution::Status::iter_limit)
      throw SolverError("milp: relaxation hit the iteration limit");
    if (rel.status == LpSolution::Status::infeasible) continue;

    const double obj = rel.objective;  // min form: the working copy is negated
    if (have_inc && obj >= inc_obj - 1e-12 * (1.0 + std::fabs(inc_obj)))
      continue;  // cannot strictly improve

    int branch_var = -1;
    double best_frac = opts.tol_int;
    for (int j : prob.binaries) {
      const double f = std::fabs(rel.x[j] - std::round(rel.x[j]));
      if (f > best_frac) {
        best_frac = f;
        branch_var = j;
      }
    }

    if (branch_var < 0) {
      // Integral: new incumbent (strict improvement established above).
      inc_obj = obj;
      inc_x = rel.x;
      for (int j : prob.binaries) inc_x[j] = std::round(inc_x[j]);
      have_inc = true;
      continue;
    }

    for (double v : {0.0, 1.0}) {
      Node child{obj, next_id++, node.fixings};
      child.fixings.emplace_back(branch_var, v);
      open.push(std::move(child));
    }
  }

  if (!have_inc) return finish(MipSolution::Status::infeasible, kInf);
  return finish(MipSolution::Status::optimal, inc_obj);
}

}  // namespace gridnk
