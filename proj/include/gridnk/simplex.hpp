// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/lp.hpp"

namespace gridnk {

struct LpOptions {
  double tol_feas = 1e-7;      // primal feasibility tolerance (scaled)
  double tol_gap = 1e-7;       // primal/dual objective agreement tolerance
  double pivot_tol = 1e-9;     // smallest acceptable pivot magnitude
  double price_tol = 1e-9;     // reduced-cost significance threshold
  long max_iters = 0;          // 0 -> 50*(m+n)+200
  int refactor_every = 64;     // basis refactorization cadence
  int stall_limit = 40;        // degenerate steps before Bland's rule kicks in
  bool verify = true;          // check feasibility + gap before reporting
};

struct LpSolution {
  enum class Status { optimal, infeasible, unbounded, iter_limit };

  Status status = Status::iter_limit;
  double objective = 0.0;       // includes obj_constant, original sense
  double dual_objective = 0.0;  // from (row_dual, reduced_cost); original sense
  std::vector<double> x;
  std::vector<double> row_dual;      // one per row; see sign note below
  std::vector<double> reduced_cost;  // one per structural variable
  std::vector<double> row_activity;  // A x per row
  long iterations = 0;

  bool optimal() const { return status == Status::optimal; }
};

// Sign convention for duals, stated once and used everywhere:
//  - minimize: row_dual >= 0 when the row binds at its lower bound,
//              <= 0 at its upper bound; reduced_cost >= 0 for a variable at
//              its lower bound, <= 0 at its upper bound.
//  - maximize: all signs flipped (>= 0 when binding at the upper bound).
// At optimality: objective == sum_i row_dual*activity + sum_j rc*x within
// tol_gap, which is exactly the dual objective reported.
//
// Bounded-variable two-phase revised simplex. Rows are handled as
// A x - s = 0 with the row bounds carried by the slack s. The basis is kept
// as a sparse LU factorization (refreshed every refactor_every pivots) with
// product-form eta updates in between. Entering rule: largest reduced cost,
// ties broken by lowest column index; after stall_limit degenerate steps the
// rule switches to Bland's until a real step is made. Leaving rule: smallest
// ratio, ties broken by largest pivot magnitude then lowest column index.
class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, const LpOptions& opts)
      : opts_(opts), n_(lp.num_vars()), m_(lp.num_rows()) {
    lp.validate();
    flip_ = lp.sense == LinearProgram::Sense::maximize;
    nt_ = n_ + m_;
    cost_.assign(nt_, 0.0);
    lo_.assign(nt_, 0.0);
    hi_.assign(nt_, 0.0);
    cols_.assign(nt_, {});
    for (int j = 0; j < n_; ++j) {
      cost_[j] = flip_ ? -lp.obj[j] : lp.obj[j];
      lo_[j] = lp.var_lo[j];
      hi_[j] = lp.var_hi[j];
    }
    for (int i = 0; i < m_; ++i) {
      const LpRow& r = lp.rows[i];
      for (const LpTerm& t : r.terms)
        if (t.coeff != 0.0) cols_[t.var].push_back({i, t.coeff});
      lo_[n_ + i] = r.lo;
      hi_[n_ + i] = r.hi;
      cols_[n_ + i].push_back({i, -1.0});
    }
    const_ = flip_ ? -lp.obj_constant : lp.obj_constant;
    max_iters_ = opts.max_iters > 0 ? opts.max_iters : 50L * (m_ + n_) + 200;
  }

  LpSolution solve() {
    start_basis();
    LpSolution out;
    out.x.assign(n_, 0.0);
    out.row_dual.assign(m_, 0.0);
    out.reduced_cost.assign(n_, 0.0);
    out.row_activity.assign(m_, 0.0);

    Status st = iterate();
    while (st == Status::optimal && shifted_) {
      // Optimal for the anti-degeneracy-shifted bounds only: restore the
      // true bounds and resume from this near-optimal basis.
      remove_shift();
      st = iterate();
    }
    int repairs = 0;
    while (st == Status::optimal && opts_.verify && !self_check() &&
           repairs < 3) {
      // Numerical drift detected at claimed optimum: rebuild and resume.
      refactor();
      st = iterate();
      ++repairs;
    }
    if (st == Status::optimal && opts_.verify && !self_check())
      throw SolverError("simplex: invariant check failed after repairs");

    out.iterations = iter_;
    switch (st) {
      case Status::optimal: {
        out.status = LpSolution::Status::optimal;
        double pobj = const_;
        for (int j = 0; j < n_; ++j) pobj += cost_[j] * xval_[j];
        // Duals from the final basis.
        Eigen::VectorXd y = btran_cost();
        double dobj = const_;
        for (int j = 0; j < nt_; ++j) {
          if (state_[j] == VarState::kBasic) continue;
          double d = cost_[j] - dot(cols_[j], y);
          dobj += d * xval_[j];
          if (j < n_) out.reduced_cost[j] = flip_ ? -d : d;
        }
        for (int i = 0; i < m_; ++i)
          out.row_dual[i] = flip_ ? -y[i] : y[i];
        out.objective = flip_ ? -pobj : pobj;
        out.dual_objective = flip_ ? -dobj : dobj;
        for (int j = 0; j < n_; ++j) out.x[j] = xval_[j];
        activities(out.row_activity);
        break;
      }
      case Status::infeasible:
        out.status = LpSolution::Status::infeasible;
        break;
      case Status::unbounded:
        out.status = LpSolution::Status::unbounded;
        out.objective = flip_ ? kInf : -kInf;
        break;
      case Status::iter_limit:
        out.status = LpSolution::Status::iter_limit;
        break;
    }
    return out;
  }

 private:
  enum class Status { optimal, infeasible, unbounded, iter_limit };
  enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

  using SpMat = Eigen::SparseMatrix<double>;
  using Lu = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

  static double dot(const std::vector<std::pair<int, double>>& col,
                    const Eigen::VectorXd& y) {
    double s = 0.0;
    for (const auto& [i, v] : col) s += v * y[i];
    return s;
  }

  void start_basis() {
    state_.assign(nt_, VarState::kAtLower);
    xval_.assign(nt_, 0.0);
    basic_.assign(m_, 0);
    pos_.assign(nt_, -1);
    left_iter_.assign(nt_, std::numeric_limits<long>::min() / 2);
    if (shifted_) {  // stale shift from an aborted earlier solve
      lo_ = lo_base_;
      hi_ = hi_base_;
      shifted_ = false;
    }
    shift_rounds_ = 0;
    for (int j = 0; j < n_; ++j) {
      if (lo_[j] > -kInf) {
        state_[j] = VarState::kAtLower;
        xval_[j] = lo_[j];
      } else if (hi_[j] < kInf) {
        state_[j] = VarState::kAtUpper;
        xval_[j] = hi_[j];
      } else {
        state_[j] = VarState::kFree;
        xval_[j] = 0.0;
      }
    }
    for (int i = 0; i < m_; ++i) {
      int s = n_ + i;
      basic_[i] = s;
      pos_[s] = i;
      state_[s] = VarState::kBasic;
    }
    iter_ = 0;
    bland_ = false;
    stall_ = 0;
    refactor();
  }

  void refactor() {
    if (m_ == 0) {
      dirty_ = false;
      return;
    }
    std::vector<Eigen::Triplet<double>> trips;
    for (int p = 0; p < m_; ++p)
      for (const auto& [i, v] : cols_[basic_[p]]) trips.emplace_back(i, p, v);
    SpMat B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    luB_.compute(B);
    if (luB_.info() != Eigen::Success)
      throw SolverError("simplex: basis factorization failed");
    SpMat Bt = SpMat(B.transpose());
    luBT_.compute(Bt);
    if (luBT_.info() != Eigen::Success)
      throw SolverError("simplex: transposed basis factorization failed");
    eta_pos_.clear();
    eta_vec_.clear();
    // Exact basic values: B x_B = -(sum of nonbasic columns at their bounds).
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    for (int j = 0; j < nt_; ++j) {
      if (state_[j] == VarState::kBasic || xval_[j] == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) rhs[i] -= v * xval_[j];
    }
    Eigen::VectorXd xb = luB_.solve(rhs);
    for (int p = 0; p < m_; ++p) xval_[basic_[p]] = xb[p];
    dirty_ = false;
  }

  Eigen::VectorXd ftran(const std::vector<std::pair<int, double>>& col) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(m_);
    if (m_ == 0) return a;
    for (const auto& [i, v] : col) a[i] = v;
    Eigen::VectorXd w = luB_.solve(a);
    for (std::size_t k = 0; k < eta_pos_.size(); ++k) {
      const int p = eta_pos_[k];
      const Eigen::VectorXd& e = eta_vec_[k];
      const double wp = w[p] / e[p];
      w -= e * wp;
      w[p] = wp;
    }
    return w;
  }

  Eigen::VectorXd btran(Eigen::VectorXd y) const {
    if (m_ == 0) return y;
    for (std::size_t k = eta_pos_.size(); k-- > 0;) {
      const int p = eta_pos_[k];
      const Eigen::VectorXd& e = eta_vec_[k];
      y[p] = (y[p] - (y.dot(e) - y[p] * e[p])) / e[p];
    }
    return luBT_.solve(y);
  }

  Eigen::VectorXd btran_cost() const {
    Eigen::VectorXd cb(m_);
    for (int p = 0; p < m_; ++p) cb[p] = cost_[basic_[p]];
    return btran(std::move(cb));
  }

  void activities(std::vector<double>& act) const {
    std::fill(act.begin(), act.end(), 0.0);
    for (int j = 0; j < n_; ++j) {
      if (xval_[j] == 0.0) continue;
      for (const auto& [i, v] : cols_[j]) act[i] += v * xval_[j];
    }
  }

  double viol_tol(int j) const {
    double scale = 0.0;
    if (lo_[j] > -kInf) scale = std::max(scale, std::fabs(lo_[j]));
    if (hi_[j] < kInf) scale = std::max(scale, std::fabs(hi_[j]));
    return opts_.tol_feas * (1.0 + scale);
  }

  // Violation of a basic variable beyond tolerance: <0 below lower, >0 above
  // upper, 0 when (tolerably) inside.
  double violation(int j) const {
    if (xval_[j] < lo_[j] - viol_tol(j)) return xval_[j] - lo_[j];
    if (xval_[j] > hi_[j] + viol_tol(j)) return xval_[j] - hi_[j];
    return 0.0;
  }

  Status iterate() {
    while (true) {
      if (iter_ >= max_iters_) return Status::iter_limit;
      // Anti-cycling mode keeps the eta file short: reduced costs read
      // through a long eta chain drift away from their exact values, and
      // Bland's termination guarantee assumes exact pricing.
      if (static_cast<int>(eta_pos_.size()) >=
          (bland_ ? 16 : opts_.refactor_every))
        refactor();

      bool infeas = false;
      for (int p = 0; p < m_; ++p)
        if (violation(basic_[p]) != 0.0) {
          infeas = true;
          break;
        }

      // Phase costs: true costs, or infeasibility direction costs.
      Eigen::VectorXd cb(m_);
      for (int p = 0; p < m_; ++p) {
        if (infeas) {
          double v = violation(basic_[p]);
          cb[p] = v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0);
        } else {
          cb[p] = cost_[basic_[p]];
        }
      }
      Eigen::VectorXd y = btran(std::move(cb));

      int enter = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < nt_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        if (hi_[j] - lo_[j] <= 0.0) continue;  // fixed, cannot move
        const double cj = infeas ? 0.0 : cost_[j];
        const double d = cj - dot(cols_[j], y);
        const double ptol = opts_.price_tol * (1.0 + std::fabs(cj));
        int sigma = 0;
        if (state_[j] == VarState::kAtLower && d < -ptol)
          sigma = +1;
        else if (state_[j] == VarState::kAtUpper && d > ptol)
          sigma = -1;
        else if (state_[j] == VarState::kFree && std::fabs(d) > ptol)
          sigma = d < 0.0 ? +1 : -1;
        if (sigma == 0) continue;
        if (bland_) {
          // Re-entry guard: while the eta file is non-empty the reduced
          // costs are inexact, so a variable that left the basis moments
          // ago may look eligible again purely through pricing drift, and
          // the resulting swap cycle is one Bland's rule cannot break (its
          // finite-termination proof assumes exact arithmetic).  Defer such
          // candidates; if every candidate is deferred, the no-candidate
          // path below refactors and re-prices exactly, and with an empty
          // eta file the guard stands aside entirely.
          if (!eta_pos_.empty() && iter_ - left_iter_[j] <= kReentryWindow)
            continue;
          enter = j;
          dir = sigma;
          break;
        }
        if (std::fabs(d) > best) {
          best = std::fabs(d);
          enter = j;
          dir = sigma;
        }
      }

      if (enter < 0) {
        if (dirty_) {
          refactor();
          continue;  // re-price against the exact basis
        }
        if (!infeas) return Status::optimal;
        return Status::infeasible;
      }

      Eigen::VectorXd w = ftran(cols_[enter]);

      // Ratio test. Events: a basic variable reaching a bound (an infeasible
      // one reaching the bound it violates), or the entering variable
      // reaching its opposite bound.
      double t_best = kInf;
      int leave_pos = -1;
      bool leave_at_upper = false;
      double leave_piv = 0.0;
      for (int p = 0; p < m_; ++p) {
        if (std::fabs(w[p]) <= opts_.pivot_tol) continue;
        const int bj = basic_[p];
        const double rate = -dir * w[p];  // d x_bj / d t
        const double v = violation(bj);
        double target = kInf;
        bool at_upper = false;
        if (v < 0.0) {  // below lower: event only when rising back to lower
          if (rate > 0.0) target = lo_[bj];
        } else if (v > 0.0) {  // above upper: event when falling to upper
          if (rate < 0.0) {
            target = hi_[bj];
            at_upper = true;
          }
        } else if (rate > 0.0) {
          if (hi_[bj] < kInf) {
            target = hi_[bj];
            at_upper = true;
          }
        } else {
          if (lo_[bj] > -kInf) target = lo_[bj];
        }
        if (!std::isfinite(target)) continue;
        double t = (target - xval_[bj]) / rate;
        if (t < 0.0) t = 0.0;  // degenerate
        if (bland_) {
          // Anti-cycling mode needs the textbook leaving rule: the exact
          // minimum ratio, ties broken by the smallest basic index alone.
          // Preferring larger pivots inside a tie window (the stable-mode
          // rule below) voids the finite-termination guarantee and lets
          // heavily degenerate bases cycle forever.
          if (leave_pos < 0 || t < t_best ||
              (t == t_best && bj < basic_[leave_pos])) {
            t_best = t;
            leave_pos = p;
            leave_at_upper = at_upper;
            leave_piv = std::fabs(w[p]);
          }
          continue;
        }
        const double tie = leave_pos < 0 ? 0.0 : 1e-10 + 1e-9 * t_best;
        if (leave_pos < 0 || t < t_best - tie) {
          t_best = t;
          leave_pos = p;
          leave_at_upper = at_upper;
          leave_piv = std::fabs(w[p]);
        } else if (t <= t_best + tie) {
          if (std::fabs(w[p]) > leave_piv + 1e-12 ||
              (std::fabs(std::fabs(w[p]) - leave_piv) <= 1e-12 &&
               basic_[p] < basic_[leave_pos])) {
            t_best = std::min(t_best, t);
            leave_pos = p;
            leave_at_upper = at_upper;
            leave_piv = std::fabs(w[p]);
          }
        }
      }

      double t_flip = kInf;
      if (lo_[enter] > -kInf && hi_[enter] < kInf)
        t_flip = hi_[enter] - lo_[enter];

      if (t_flip <= t_best) {
        if (!std::isfinite(t_flip)) {
          // No blocking event and no opposite bound.
          if (infeas)
            throw SolverError("simplex: unbounded infeasibility direction");
          return Status::unbounded;
        }
        // Bound flip: no basis change.
        xval_[enter] = dir > 0 ? hi_[enter] : lo_[enter];
        state_[enter] =
            dir > 0 ? VarState::kAtUpper : VarState::kAtLower;
        for (int p = 0; p < m_; ++p)
          if (w[p] != 0.0) xval_[basic_[p]] -= dir * t_flip * w[p];
        dirty_ = true;
        track_stall(t_flip);
        ++iter_;
        continue;
      }

      if (leave_pos < 0) {
        // No blocking event at all.
        if (infeas)
          throw SolverError("simplex: unbounded infeasibility direction");
        return Status::unbounded;
      }

      // Pivot.
      const int leave = basic_[leave_pos];
      xval_[enter] += dir * t_best;
      for (int p = 0; p < m_; ++p)
        if (w[p] != 0.0) xval_[basic_[p]] -= dir * t_best * w[p];
      xval_[leave] = leave_at_upper ? hi_[leave] : lo_[leave];  // snap
      state_[leave] =
          leave_at_upper ? VarState::kAtUpper : VarState::kAtLower;
      pos_[leave] = -1;
      left_iter_[leave] = iter_;
      basic_[leave_pos] = enter;
      pos_[enter] = leave_pos;
      state_[enter] = VarState::kBasic;
      eta_pos_.push_back(leave_pos);
      eta_vec_.push_back(w);
      dirty_ = true;
      track_stall(t_best);
      ++iter_;
    }
  }

  void track_stall(double step) {
    if (step > 1e-12) {
      stall_ = 0;
      bland_ = false;
    } else if (++stall_ >= opts_.stall_limit) {
      // A long run of zero-length steps means the iteration is walking a
      // degenerate plateau.  First line of defence: shift every finite bound
      // outward by a tiny deterministic per-variable amount.  The shifted
      // problem has geometrically separated vertices, so every pivot makes
      // strictly positive progress and ordinary Dantzig pricing can keep
      // choosing good directions; Bland's smallest-index rule (the final
      // fallback, guaranteed finite but often glacially slow on large
      // plateaus) is reserved for the rare case where shifting has been
      // exhausted.
      if (!shifted_ && shift_rounds_ < kMaxShiftRounds) {
        apply_shift();
        stall_ = 0;
      } else {
        bland_ = true;
      }
    }
  }

  // Per-variable bound-shift magnitude: deterministic, loosely equidistributed
  // via the golden ratio so adjacent variables do not share shift sizes, kept
  // strictly below viol_tol so that restoring the true bounds leaves any
  // protruding basic value within the feasibility tolerance.
  double shift_delta(int j) const {
    double f = (j + 1) * 0.618033988749895 + shift_rounds_ * 0.754877666246693;
    f -= std::floor(f);
    double scale = 0.0;
    if (lo_[j] > -kInf) scale = std::max(scale, std::fabs(lo_[j]));
    if (hi_[j] < kInf) scale = std::max(scale, std::fabs(hi_[j]));
    return opts_.tol_feas * (0.25 + 0.5 * f) * (1.0 + scale);
  }

  void apply_shift() {
    lo_base_ = lo_;
    hi_base_ = hi_;
    for (int j = 0; j < nt_; ++j) {
      if (hi_[j] - lo_[j] <= 0.0) continue;  // fixed variables stay fixed
      const double d = shift_delta(j);
      if (lo_[j] > -kInf) lo_[j] -= d;
      if (hi_[j] < kInf) hi_[j] += d;
    }
    shifted_ = true;
    ++shift_rounds_;
    bland_ = false;
  }

  // Restore the true bounds after solving to optimality of the shifted
  // problem: snap nonbasic variables back onto their bounds and recompute the
  // basic values exactly.  Any basic value left protruding does so by less
  // than the feasibility tolerance (shift sizes are capped below viol_tol),
  // and the caller resumes iterating to true optimality from this basis.
  void remove_shift() {
    lo_ = lo_base_;
    hi_ = hi_base_;
    for (int j = 0; j < nt_; ++j) {
      if (state_[j] == VarState::kAtLower)
        xval_[j] = lo_[j];
      else if (state_[j] == VarState::kAtUpper)
        xval_[j] = hi_[j];
    }
    shifted_ = false;
    refactor();
    stall_ = 0;
    bland_ = false;
  }

  // Exact feasibility + gap check on a refactored basis.
  bool self_check() {
    if (dirty_) refactor();
    for (int j = 0; j < nt_; ++j) {
      const double t = viol_tol(j);
      if (xval_[j] < lo_[j] - t || xval_[j] > hi_[j] + t) return false;
    }
    Eigen::VectorXd y = btran_cost();
    double pobj = 0.0, dobj = 0.0;
    for (int j = 0; j < n_; ++j) pobj += cost_[j] * xval_[j];
    for (int j = 0; j < nt_; ++j) {
      if (state_[j] == VarState::kBasic) continue;
      const double d = cost_[j] - dot(cols_[j], y);
      dobj += d * xval_[j];
      const double dtol = 10.0 * opts_.price_tol * (1.0 + std::fabs(cost_[j]));
      if (state_[j] == VarState::kAtLower && hi_[j] > lo_[j] && d < -dtol)
        return false;
      if (state_[j] == VarState::kAtUpper && hi_[j] > lo_[j] && d > dtol)
        return false;
      if (state_[j] == VarState::kFree && std::fabs(d) > dtol) return false;
    }
    return std::fabs(pobj - dobj) <= opts_.tol_gap * (1.0 + std::fabs(pobj));
  }

  LpOptions opts_;
  int n_ = 0, m_ = 0, nt_ = 0;
  bool flip_ = false;
  double const_ = 0.0;
  long max_iters_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;
  std::vector<double> cost_, lo_, hi_, xval_;
  std::vector<VarState> state_;
  std::vector<int> basic_, pos_;
  Lu luB_, luBT_;
  std::vector<int> eta_pos_;
  std::vector<Eigen::VectorXd> eta_vec_;
  // Iteration at which each variable last left the basis (guards Bland-mode
  // pricing against drift-driven re-entry; see iterate()).
  static constexpr long kReentryWindow = 64;
  std::vector<long> left_iter_;
  // Anti-degeneracy bound shifting (see track_stall / apply_shift).
  static constexpr int kMaxShiftRounds = 3;
  bool shifted_ = false;
  int shift_rounds_ = 0;
  std::vector<double> lo_base_, hi_base_;
  long iter_ = 0;
  int stall_ = 0;
  bool bland_ = false;
  bool dirty_ = false;
};

inline LpSolution solve_lp(const LinearProgram& lp, const LpOptions& opts = {}) {
  SimplexSolver s(lp, opts);
  return s.solve();
}

}  // namespace gridnk
