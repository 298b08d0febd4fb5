// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/loadshed.hpp"
#include "gridnk/network.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/threads.hpp"

namespace gridnk {

struct EnumerateOptions {
  bool keep_table = false;   // retain every (plan, value) pair
  bool budget_exact = false; // plans of size exactly k instead of <= k
  long eval_cap = 1000000;   // refuse beyond this many plan-scenario solves
  int n_threads = 1;
};

struct EnumerationResult {
  InterdictionPlan best_plan;
  double best_value = 0.0;  // expected shed of best_plan, MW
  long evaluated = 0;       // number of plans evaluated
  std::vector<std::pair<InterdictionPlan, double>> per_plan;  // if kept
};

namespace detail {

// Canonical component key: generators sort before lines, then by id.
inline std::string component_key(bool is_gen, const std::string& id) {
  return (is_gen ? "g:" : "l:") + id;
}

inline std::vector<std::string> plan_keys(const InterdictionPlan& p) {
  std::vector<std::string> keys;
  for (const auto& g : p.attacked_gens) keys.push_back(component_key(true, g));
  for (const auto& l : p.attacked_lines)
    keys.push_back(component_key(false, l));
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace detail

// Brute force over every interdiction plan within the budget: the exact
// optimum of the expected-shed maximization, used as ground truth. Plans are
// enumerated in lexicographic component order; on equal value the plan with
// the lexicographically smaller key vector wins, so the result is unique.
inline EnumerationResult enumerate_exact(const Network& net,
                                         const ScenarioSet& ss, int k,
                                         const EnumerateOptions& opts = {}) {
  if (k < 0) throw ConfigError("enumerate: k must be nonnegative");
  validate_scenarios(ss, net);

  // Component list in canonical order.
  std::vector<std::pair<bool, std::string>> comp;  // (is_gen, id)
  {
    std::vector<std::string> gens, lines;
    for (const Generator& g : net.generators) gens.push_back(g.id);
    for (const Line& l : net.lines) lines.push_back(l.id);
    std::sort(gens.begin(), gens.end());
    std::sort(lines.begin(), lines.end());
    for (auto& g : gens) comp.emplace_back(true, std::move(g));
    for (auto& l : lines) comp.emplace_back(false, std::move(l));
  }
  const int n = static_cast<int>(comp.size());
  const int kk = std::min(k, n);

  // Count plans up front and enforce the evaluation cap.
  double plan_count = 0.0;
  {
    double c = 1.0;  // C(n, 0)
    for (int j = 0; j <= kk; ++j) {
      if (!opts.budget_exact || j == kk) plan_count += c;
      c = c * (n - j) / (j + 1);
    }
  }
  const double solves = plan_count * static_cast<double>(ss.scenarios.size());
  if (solves > static_cast<double>(opts.eval_cap))
    throw CapExceeded("enumerate: " + std::to_string(static_cast<long>(solves)) +
                      " plan-scenario evaluations exceed the cap of " +
                      std::to_string(opts.eval_cap));

  // Materialize the plans in deterministic order.
  std::vector<InterdictionPlan> plans;
  plans.reserve(static_cast<std::size_t>(plan_count));
  auto push_plan = [&](const std::vector<int>& pick) {
    InterdictionPlan p;
    for (int idx : pick) {
      if (comp[idx].first)
        p.attacked_gens.push_back(comp[idx].second);
      else
        p.attacked_lines.push_back(comp[idx].second);
    }
    plans.push_back(std::move(p));
  };
  for (int j = opts.budget_exact ? kk : 0; j <= kk; ++j) {
    if (j == 0) {
      push_plan({});
      continue;
    }
    std::vector<int> pick(j);
    for (int a = 0; a < j; ++a) pick[a] = a;
    while (true) {
      push_plan(pick);
      int pos = j - 1;
      while (pos >= 0 && pick[pos] == n - j + pos) --pos;
      if (pos < 0) break;
      ++pick[pos];
      for (int a = pos + 1; a < j; ++a) pick[a] = pick[a - 1] + 1;
    }
  }

  std::vector<double> value(plans.size(), 0.0);
  parallel_for(static_cast<long>(plans.size()), opts.n_threads, [&](long i) {
    value[i] = expected_shed(net, ss, plans[i]);
  });

  EnumerationResult out;
  out.evaluated = static_cast<long>(plans.size());
  std::vector<std::string> best_keys;
  bool have = false;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    std::vector<std::string> keys = detail::plan_keys(plans[i]);
    if (!have || value[i] > out.best_value ||
        (value[i] == out.best_value && keys < best_keys)) {
      have = true;
      out.best_value = value[i];
      out.best_plan = plans[i];
      best_keys = std::move(keys);
    }
    if (opts.keep_table) out.per_plan.emplace_back(plans[i], value[i]);
  }
  return out;
}

}  // namespace gridnk
