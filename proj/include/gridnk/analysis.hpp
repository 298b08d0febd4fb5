// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/cutplane.hpp"
#include "gridnk/enumerate.hpp"
#include "gridnk/loadshed.hpp"
#include "gridnk/network.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/threads.hpp"

namespace gridnk {

// Which optimizer scores an interdiction instance in the analyses below:
// exhaustive enumeration (exact, desk scale) or the cutting-plane heuristic
// (scales further; its incumbent value is a valid lower bound).
enum class SolveMethod { enumeration, cutplane };

struct AnalysisOptions {
  int n_threads = 1;            // batch-level parallelism in saa_batches
  EnumerateOptions enumerate;   // per-solve controls, method == enumeration
  CutPlaneOptions cutplane;     // per-solve controls, method == cutplane
};

// How much the scenario-aware attack gains over planning against a single
// averaged grid. All values in MW on the original network and scenario set.
struct VssReport {
  double z = 0.0;        // stochastic optimum (or best found), MW
  double eev = 0.0;      // expected shed when playing the averaged-grid plan
  double vss = 0.0;      // z - eev
  double vss_pct = 0.0;  // 100 * vss / z, 0 when z == 0
  InterdictionPlan evp_plan;
  SolveMethod method = SolveMethod::enumeration;
};

// Batched sample-average study: scenario set shuffled and partitioned, each
// batch solved independently, batch optima summarized with a Student-t 95%
// confidence half-width, and the best per-batch plan re-scored on the full
// scenario set (a valid incumbent for the full problem).
struct SaaReport {
  std::vector<double> batch_values;  // optimum per batch, MW, batch order
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  InterdictionPlan best_plan_overall;
  double full_set_value_of_best = 0.0;
};

namespace detail {

inline void require_normalized(const ScenarioSet& ss, const Network& net,
                               const char* what) {
  validate_scenarios(ss, net);
  double w = 0.0;
  for (const Scenario& s : ss.scenarios) w += s.weight;
  if (ss.scenarios.empty() || std::fabs(w - 1.0) > 1e-6)
    throw ConfigError(std::string(what) +
                      ": scenario weights must be normalized");
}

// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cont_frac(double a, double b, double x) {
  const double tiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h;
}

// Regularized incomplete beta I_x(a, b).
inline double reg_inc_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
               a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cont_frac(a, b, x) / a;
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

// 97.5th percentile of the Student-t distribution with dof degrees of
// freedom, solved by bisection on the tail probability
// P(T > t) = I_{dof/(dof+t^2)}(dof/2, 1/2) / 2 for t >= 0.
inline double student_t_975(int dof) {
  if (dof < 1) throw Error("student_t_975: dof must be >= 1");
  const double nu = static_cast<double>(dof);
  auto tail2 = [&](double t) {  // 2 * P(T > t)
    return reg_inc_beta(nu / 2.0, 0.5, nu / (nu + t * t));
  };
  double hi = 2.0;
  while (tail2(hi) > 0.05) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tail2(mid) > 0.05)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Student-t 95% confidence half-width of the mean of v: t * s / sqrt(n)
// with the sample standard deviation s. Zero when the values coincide.
inline double ci95_halfwidth(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  if (n < 2) throw Error("ci95_halfwidth: need at least 2 values");
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ssq = 0.0;
  for (double x : v) ssq += (x - mean) * (x - mean);
  if (ssq == 0.0) return 0.0;
  const double s = std::sqrt(ssq / (n - 1));
  return student_t_975(n - 1) * s / std::sqrt(static_cast<double>(n));
}

// Best attack under the chosen optimizer. For the heuristic the returned
// value is the incumbent's exactly evaluated expected shed (z_lb).
inline std::pair<InterdictionPlan, double> best_attack(
    const Network& net, const ScenarioSet& ss, int k, SolveMethod method,
    const AnalysisOptions& opts) {
  if (method == SolveMethod::enumeration) {
    EnumerationResult r = enumerate_exact(net, ss, k, opts.enumerate);
    return {std::move(r.best_plan), r.best_value};
  }
  CutPlaneResult r = run_cutting_plane(net, ss, k, opts.cutplane);
  return {std::move(r.state.incumbent), r.state.z_lb};
}

}  // namespace detail

// The averaged grid: every component's capacity scaled by its expected
// availability under the scenario weights (line limit t * avail, generator
// cap pmax * avail). A component whose expected availability is zero is an
// outage in the single synthetic scenario instead — its capacity is left
// untouched, and turning it off also releases its voltage-angle coupling,
// which a zero capacity alone would not. For positive availability the
// coupling stays active alongside the shrunken limit.
struct EvpProblem {
  Network net;     // capacity-scaled copy of the original network
  ScenarioSet ss;  // one synthetic scenario, weight 1
};

inline EvpProblem build_evp_problem(const Network& net, const ScenarioSet& ss) {
  detail::require_normalized(ss, net, "evp");
  const MeanAvailability ma = mean_availability(ss, net);
  const double zero_avail = 1e-9;  // availability at or below this is an outage

  EvpProblem out;
  out.net = net;
  Scenario sc;
  sc.id = "evp";
  sc.weight = 1.0;
  for (Line& l : out.net.lines) {
    const double xi = ma.line.at(l.id);
    if (xi <= zero_avail)
      sc.off_lines.push_back(l.id);
    else
      l.thermal_mw *= xi;
  }
  for (Generator& g : out.net.generators) {
    const double xi = ma.gen.at(g.id);
    if (xi <= zero_avail)
      sc.off_gens.push_back(g.id);
    else
      g.pmax_mw *= xi;
  }
  std::sort(sc.off_lines.begin(), sc.off_lines.end());
  std::sort(sc.off_gens.begin(), sc.off_gens.end());
  out.net.validate();
  out.ss.scenarios.push_back(std::move(sc));
  return out;
}

// Deterministic interdiction on the averaged grid: the plan an attacker
// would pick if uncertainty were collapsed to expected availabilities.
inline InterdictionPlan solve_evp(
    const Network& net, const ScenarioSet& ss, int k,
    SolveMethod method = SolveMethod::enumeration,
    const AnalysisOptions& opts = {}) {
  const EvpProblem evp = build_evp_problem(net, ss);
  return detail::best_attack(evp.net, evp.ss, k, method, opts).first;
}

// z: best attack value on the true scenario set. eev: what the averaged-grid
// plan actually achieves on the true set. vss = z - eev measures the value of
// optimizing against the scenarios themselves; it is nonnegative (up to the
// optimizer's exactness) because the averaged-grid plan is one feasible
// attack. vss_pct uses z as the base.
inline VssReport compute_vss(const Network& net, const ScenarioSet& ss, int k,
                             SolveMethod method = SolveMethod::enumeration,
                             const AnalysisOptions& opts = {}) {
  detail::require_normalized(ss, net, "vss");
  VssReport rep;
  rep.method = method;
  rep.z = detail::best_attack(net, ss, k, method, opts).second;
  rep.evp_plan = solve_evp(net, ss, k, method, opts);
  rep.eev = expected_shed(net, ss, rep.evp_plan, opts.n_threads);
  rep.vss = rep.z - rep.eev;
  rep.vss_pct = rep.z == 0.0 ? 0.0 : 100.0 * rep.vss / rep.z;
  return rep;
}

// Shuffles the scenarios with the seeded generator, partitions them into
// n_batches consecutive groups (floor-sized, remainder folded into the last
// batch), renormalizes each batch's weights, and solves every batch as its
// own interdiction instance. Batch optima are summarized by their mean and
// Student-t 95% half-width; the best per-batch plan is re-scored on the full
// scenario set, ties broken on the canonical component-key order so reruns
// with the same seed reproduce the report exactly.
inline SaaReport saa_batches(const Network& net, const ScenarioSet& ss, int k,
                             int n_batches, SolveMethod method,
                             std::uint64_t seed,
                             const AnalysisOptions& opts = {}) {
  detail::require_normalized(ss, net, "saa");
  const int n = static_cast<int>(ss.scenarios.size());
  if (n_batches < 2)
    throw ConfigError("saa: n_batches must be >= 2 for a confidence interval");
  if (n_batches > n)
    throw ConfigError("saa: n_batches exceeds the scenario count");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  const int base = n / n_batches;
  std::vector<ScenarioSet> batch(n_batches);
  int pos = 0;
  for (int b = 0; b < n_batches; ++b) {
    const int take = b == n_batches - 1 ? n - pos : base;
    for (int i = 0; i < take; ++i)
      batch[b].scenarios.push_back(ss.scenarios[order[pos++]]);
    batch[b] = normalize(std::move(batch[b]));
  }

  std::vector<double> value(n_batches, 0.0);
  std::vector<InterdictionPlan> plan(n_batches);
  parallel_for(n_batches, opts.n_threads, [&](long b) {
    std::pair<InterdictionPlan, double> best =
        detail::best_attack(net, batch[b], k, method, opts);
    plan[b] = std::move(best.first);
    value[b] = best.second;
  });

  SaaReport rep;
  rep.batch_values = value;
  rep.mean = std::accumulate(value.begin(), value.end(), 0.0) / n_batches;
  rep.ci95_halfwidth = detail::ci95_halfwidth(value);

  bool have = false;
  std::vector<std::string> best_keys;
  for (int b = 0; b < n_batches; ++b) {
    const double full = expected_shed(net, ss, plan[b], opts.n_threads);
    std::vector<std::string> keys = detail::plan_keys(plan[b]);
    if (!have || full > rep.full_set_value_of_best ||
        (full == rep.full_set_value_of_best && keys < best_keys)) {
      have = true;
      rep.full_set_value_of_best = full;
      rep.best_plan_overall = plan[b];
      best_keys = std::move(keys);
    }
  }
  return rep;
}

}  // namespace gridnk
