// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gridnk/common.hpp"

namespace gridnk {

// One nonzero of a constraint row.
struct LpTerm {
  int var = 0;
  double coeff = 0.0;
};

// Ranged row: lo <= a'x <= hi. Equality when lo == hi, one-sided when the
// other bound is infinite.
struct LpRow {
  std::string name;
  double lo = -kInf;
  double hi = kInf;
  std::vector<LpTerm> terms;
};

// Linear program over bounded variables:
//   min/max  c'x + c0
//   s.t.     row.lo <= A x <= row.hi        per row
//            var_lo <= x <= var_hi          per variable
struct LinearProgram {
  enum class Sense { minimize, maximize };

  Sense sense = Sense::minimize;
  double obj_constant = 0.0;
  std::vector<std::string> var_name;
  std::vector<double> var_lo;
  std::vector<double> var_hi;
  std::vector<double> obj;
  std::vector<LpRow> rows;

  int num_vars() const { return static_cast<int>(var_name.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }

  int add_var(std::string name, double lo, double hi, double cost = 0.0) {
    var_name.push_back(std::move(name));
    var_lo.push_back(lo);
    var_hi.push_back(hi);
    obj.push_back(cost);
    return num_vars() - 1;
  }

  int add_row(std::string name, double lo, double hi,
              std::vector<LpTerm> terms) {
    rows.push_back(LpRow{std::move(name), lo, hi, std::move(terms)});
    return num_rows() - 1;
  }

  int add_row(LpRow row) {
    rows.push_back(std::move(row));
    return num_rows() - 1;
  }

  // Structural sanity: finite objective, ordered bound pairs, in-range and
  // non-duplicated column indices, no NaN anywhere. Throws ConfigError.
  void validate() const {
    const int n = num_vars();
    for (int j = 0; j < n; ++j) {
      if (std::isnan(var_lo[j]) || std::isnan(var_hi[j]))
        throw ConfigError("lp: NaN bound on variable " + var_name[j]);
      if (var_lo[j] > var_hi[j])
        throw ConfigError("lp: lower > upper on variable " + var_name[j]);
      if (!is_finite(obj[j]))
        throw ConfigError("lp: non-finite objective coefficient on " +
                          var_name[j]);
    }
    if (!is_finite(obj_constant)) throw ConfigError("lp: non-finite constant");
    std::vector<int> seen(n, -1);
    for (int i = 0; i < num_rows(); ++i) {
      const LpRow& r = rows[i];
      if (std::isnan(r.lo) || std::isnan(r.hi))
        throw ConfigError("lp: NaN bound on row " + r.name);
      if (r.lo > r.hi) throw ConfigError("lp: lower > upper on row " + r.name);
      if (r.lo == kInf || r.hi == -kInf)
        throw ConfigError("lp: empty bound interval on row " + r.name);
      for (const LpTerm& t : r.terms) {
        if (t.var < 0 || t.var >= n)
          throw ConfigError("lp: column index out of range in row " + r.name);
        if (!is_finite(t.coeff))
          throw ConfigError("lp: non-finite coefficient in row " + r.name);
        if (seen[t.var] == i)
          throw ConfigError("lp: duplicate column in row " + r.name);
        seen[t.var] = i;
      }
    }
  }
};

// Mixed-binary program: an LP plus the set of variables restricted to {0,1}.
struct MipProblem {
  LinearProgram lp;
  std::vector<int> binaries;
};

// Textbook dual of a bounded LP, under the convention:
//   primal  min c'x + c0,  L <= Ax <= U, l <= x <= u
//   dual    max L'y+ - U'y- + l'r+ - u'r- + c0
//           s.t. per primal variable j:  A_j'(y+ - y-) + r+_j - r-_j = c_j
//           y+, y-, r+, r- >= 0; components with an infinite bound dropped.
// Equality rows and fixed variables contribute a single free multiplier.
// For a maximization primal the same construction is applied to the
// negated objective and the resulting program is flipped back, so
// objective values always satisfy value(dual_of(lp)) == value(lp).
inline LinearProgram dual_of(const LinearProgram& primal) {
  primal.validate();
  const bool flip = primal.sense == LinearProgram::Sense::maximize;
  auto pcost = [&](int j) { return flip ? -primal.obj[j] : primal.obj[j]; };

  LinearProgram d;
  d.sense = LinearProgram::Sense::maximize;
  d.obj_constant = flip ? -primal.obj_constant : primal.obj_constant;

  const int n = primal.num_vars();
  const int m = primal.num_rows();
  // Dual rows: one equality per primal variable, built up incrementally.
  std::vector<std::vector<LpTerm>> drow(n);

  for (int i = 0; i < m; ++i) {
    const LpRow& r = primal.rows[i];
    if (r.lo == r.hi) {
      int y = d.add_var(r.name + "__eq", -kInf, kInf, r.lo);
      for (const LpTerm& t : r.terms) drow[t.var].push_back({y, t.coeff});
    } else {
      if (r.lo > -kInf) {
        int y = d.add_var(r.name + "__lo", 0.0, kInf, r.lo);
        for (const LpTerm& t : r.terms) drow[t.var].push_back({y, t.coeff});
      }
      if (r.hi < kInf) {
        int y = d.add_var(r.name + "__hi", 0.0, kInf, -r.hi);
        for (const LpTerm& t : r.terms) drow[t.var].push_back({y, -t.coeff});
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const double lo = primal.var_lo[j], hi = primal.var_hi[j];
    if (lo == hi) {
      int v = d.add_var(primal.var_name[j] + "__fx", -kInf, kInf, lo);
      drow[j].push_back({v, 1.0});
    } else {
      if (lo > -kInf) {
        int v = d.add_var(primal.var_name[j] + "__lb", 0.0, kInf, lo);
        drow[j].push_back({v, 1.0});
      }
      if (hi < kInf) {
        int v = d.add_var(primal.var_name[j] + "__ub", 0.0, kInf, -hi);
        drow[j].push_back({v, -1.0});
      }
    }
  }
  for (int j = 0; j < n; ++j)
    d.add_row(primal.var_name[j], pcost(j), pcost(j), std::move(drow[j]));

  if (flip) {
    d.sense = LinearProgram::Sense::minimize;
    for (double& c : d.obj) c = -c;
    d.obj_constant = -d.obj_constant;
  }
  return d;
}

}  // namespace gridnk
