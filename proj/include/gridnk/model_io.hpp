// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gridnk/common.hpp"
#include "gridnk/lp.hpp"
#include "gridnk/mip.hpp"

namespace gridnk {

// Text formats for optimization models.
//   mps:     NAME/OBJSENSE/ROWS/COLUMNS/RHS/RANGES/BOUNDS/ENDATA sections,
//            one entry per line, column-aligned fields, integer columns
//            wrapped in INTORG/INTEND markers and restated as BV bounds.
//   lp_text: Maximize|Minimize / Subject To / Bounds / Binary / End blocks.
// Values are printed with 15 significant digits, which preserves optimal
// values to well within 1e-9 on round trips. Ranged rows (finite lower and
// upper) are expressed natively in MPS via RANGES; the LP text writer splits
// them into a _lo/_hi pair, preserving the feasible set and optimum but not
// the row count. Both formats are documented in docs/formats.md.
enum class ModelFormat { mps, lp_text };

namespace detail {

inline std::string sanitize_name(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                    (c >= '0' && c <= '9') || c == '_';
    out.push_back(ok ? c : '_');
  }
  if (out.empty()) out = "_";
  if (out.size() > 64) out.resize(64);
  return out;
}

inline std::string fmt_num(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

// Sanitized, per-namespace-unique row and column names. The objective row
// name OBJ is reserved in the row namespace.
struct ModelNames {
  std::vector<std::string> row;
  std::vector<std::string> col;
};

inline ModelNames make_model_names(const LinearProgram& lp) {
  ModelNames names;
  std::map<std::string, std::string> seen_row{{"OBJ", "(objective)"}};
  std::map<std::string, std::string> seen_col;
  auto claim = [](std::map<std::string, std::string>& seen,
                  const std::string& original, const char* what) {
    const std::string s = sanitize_name(original);
    auto [it, fresh] = seen.emplace(s, original);
    if (!fresh)
      throw ConfigError("model export: " + std::string(what) + " names '" +
                        it->second + "' and '" + original +
                        "' both sanitize to '" + s + "'");
    return s;
  };
  for (const LpRow& r : lp.rows)
    names.row.push_back(claim(seen_row, r.name, "row"));
  for (const std::string& c : lp.var_name)
    names.col.push_back(claim(seen_col, c, "column"));
  return names;
}

inline bool is_binary_col(const MipProblem& m, int j) {
  for (int b : m.binaries)
    if (b == j) return true;
  return false;
}

}  // namespace detail

inline std::string export_model(const MipProblem& m, ModelFormat fmt,
                                const std::string& model_name = "GRIDNK") {
  const LinearProgram& lp = m.lp;
  lp.validate();
  if (lp.num_vars() == 0)
    throw ConfigError("model export: model has no variables");
  const detail::ModelNames names = detail::make_model_names(lp);
  const int n = lp.num_vars();
  const int nr = lp.num_rows();
  std::vector<char> binary(n, 0);
  for (int b : m.binaries) {
    if (b < 0 || b >= n)
      throw ConfigError("model export: binary index out of range");
    binary[b] = 1;
  }
  std::ostringstream out;

  if (fmt == ModelFormat::mps) {
    // Row classification: E equality, L upper-only, G lower-only, ranged
    // rows are written L with a RANGES entry, fully free rows as extra N.
    out << "NAME          " << detail::sanitize_name(model_name) << "\n";
    out << "OBJSENSE\n    "
        << (lp.sense == LinearProgram::Sense::maximize ? "MAX" : "MIN")
        << "\n";
    out << "ROWS\n N  OBJ\n";
    std::vector<char> kind(nr);
    for (int i = 0; i < nr; ++i) {
      const LpRow& r = lp.rows[i];
      const bool flo = is_finite(r.lo), fhi = is_finite(r.hi);
      kind[i] = flo && fhi ? (r.lo == r.hi ? 'E' : 'R')
                           : (fhi ? 'L' : (flo ? 'G' : 'N'));
      out << " " << (kind[i] == 'R' ? 'L' : kind[i]) << "  " << names.row[i]
          << "\n";
    }

    // COLUMNS, column-major; every column anchored by its objective entry.
    std::vector<std::vector<std::pair<int, double>>> by_col(n);
    for (int i = 0; i < nr; ++i)
      for (const LpTerm& t : lp.rows[i].terms)
        by_col[t.var].push_back({i, t.coeff});
    out << "COLUMNS\n";
    bool in_int = false;
    int marker_no = 0;
    auto entry = [&](const std::string& col, const std::string& row,
                     double v) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "    %-12s  %-12s  %s\n", col.c_str(),
                    row.c_str(), detail::fmt_num(v).c_str());
      out << buf;
    };
    for (int j = 0; j < n; ++j) {
      if (static_cast<bool>(binary[j]) != in_int) {
        in_int = !in_int;
        char buf[160];
        std::snprintf(buf, sizeof buf, "    %-12s  %-12s  %s\n",
                      ("M" + std::to_string(++marker_no)).c_str(), "'MARKER'",
                      in_int ? "'INTORG'" : "'INTEND'");
        out << buf;
      }
      entry(names.col[j], "OBJ", lp.obj[j]);
      for (const auto& [row, coeff] : by_col[j])
        entry(names.col[j], names.row[row], coeff);
    }
    if (in_int) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "    %-12s  %-12s  %s\n",
                    ("M" + std::to_string(++marker_no)).c_str(), "'MARKER'",
                    "'INTEND'");
      out << buf;
    }

    out << "RHS\n";
    auto rhs_entry = [&](const std::string& row, double v) {
      if (v == 0.0) return;
      char buf[160];
      std::snprintf(buf, sizeof buf, "    %-12s  %-12s  %s\n", "RHS",
                    row.c_str(), detail::fmt_num(v).c_str());
      out << buf;
    };
    // MPS has no objective constant; it rides as -constant on the OBJ row.
    rhs_entry("OBJ", -lp.obj_constant);
    for (int i = 0; i < nr; ++i) {
      if (kind[i] == 'N') continue;
      rhs_entry(names.row[i],
                kind[i] == 'G' ? lp.rows[i].lo : lp.rows[i].hi);
    }

    bool any_range = false;
    for (int i = 0; i < nr; ++i) any_range = any_range || kind[i] == 'R';
    if (any_range) {
      out << "RANGES\n";
      for (int i = 0; i < nr; ++i) {
        if (kind[i] != 'R') continue;
        char buf[160];
        std::snprintf(buf, sizeof buf, "    %-12s  %-12s  %s\n", "RNG",
                      names.row[i].c_str(),
                      detail::fmt_num(lp.rows[i].hi - lp.rows[i].lo).c_str());
        out << buf;
      }
    }

    out << "BOUNDS\n";
    auto bound_entry = [&](const char* type, const std::string& col,
                           const double* v) {
      char buf[160];
      if (v)
        std::snprintf(buf, sizeof buf, " %-2s %-10s  %-12s  %s\n", type, "BND",
                      col.c_str(), detail::fmt_num(*v).c_str());
      else
        std::snprintf(buf, sizeof buf, " %-2s %-10s  %s\n", type, "BND",
                      col.c_str());
      out << buf;
    };
    for (int j = 0; j < n; ++j) {
      const double lo = lp.var_lo[j], hi = lp.var_hi[j];
      if (binary[j] && lo == 0.0 && hi == 1.0) {
        bound_entry("BV", names.col[j], nullptr);
        continue;
      }
      if (is_finite(lo) && lo == hi) {
        bound_entry("FX", names.col[j], &lo);
        continue;
      }
      if (!is_finite(lo))
        bound_entry("MI", names.col[j], nullptr);
      else if (lo != 0.0)
        bound_entry("LO", names.col[j], &lo);
      if (is_finite(hi)) bound_entry("UP", names.col[j], &hi);
    }
    out << "ENDATA\n";
    return out.str();
  }

  // LP text. Every variable appears in the objective (zero coefficients
  // included) so that importing recovers the full column set.
  auto term_str = [&](double c, const std::string& name, bool first) {
    std::string s;
    if (first)
      s = (c < 0 ? "- " : "") + detail::fmt_num(std::fabs(c));
    else
      s = (c < 0 ? "- " : "+ ") + detail::fmt_num(std::fabs(c));
    return s + " " + name;
  };
  out << (lp.sense == LinearProgram::Sense::maximize ? "Maximize\n"
                                                     : "Minimize\n");
  out << " OBJ:";
  for (int j = 0; j < n; ++j)
    out << " " << term_str(lp.obj[j], names.col[j], j == 0);
  if (lp.obj_constant != 0.0)
    out << " " << (lp.obj_constant < 0 ? "- " : "+ ")
        << detail::fmt_num(std::fabs(lp.obj_constant));
  out << "\nSubject To\n";
  // Ranged rows split into two inequalities; guard the derived names
  // against collisions with existing rows.
  {
    std::map<std::string, int> taken;
    for (int i = 0; i < nr; ++i) taken.emplace(names.row[i], i);
    auto fresh = [&](const std::string& base, int i) {
      auto [it, ok] = taken.emplace(base, i);
      if (!ok)
        throw ConfigError("model export: split row name '" + base +
                          "' collides with row '" + lp.rows[it->second].name +
                          "'");
      return base;
    };
    auto write_row = [&](const std::string& name, const LpRow& r,
                         const char* rel, double rhs) {
      out << " " << name << ":";
      bool first = true;
      for (const LpTerm& t : r.terms) {
        out << " " << term_str(t.coeff, names.col[t.var], first);
        first = false;
      }
      if (first) out << " 0 " << names.col[0];  // empty rows keep a column
      out << " " << rel << " " << detail::fmt_num(rhs) << "\n";
    };
    for (int i = 0; i < nr; ++i) {
      const LpRow& r = lp.rows[i];
      const bool flo = is_finite(r.lo), fhi = is_finite(r.hi);
      if (flo && fhi && r.lo == r.hi) {
        write_row(names.row[i], r, "=", r.lo);
      } else if (flo && fhi) {
        write_row(fresh(names.row[i] + "_lo", i), r, ">=", r.lo);
        write_row(fresh(names.row[i] + "_hi", i), r, "<=", r.hi);
      } else if (fhi) {
        write_row(names.row[i], r, "<=", r.hi);
      } else if (flo) {
        write_row(names.row[i], r, ">=", r.lo);
      }
      // Fully free rows carry no constraint; their terms are not part of
      // the LP text model (MPS keeps them as N rows).
    }
  }
  out << "Bounds\n";
  for (int j = 0; j < n; ++j) {
    const double lo = lp.var_lo[j], hi = lp.var_hi[j];
    if (binary[j] && lo == 0.0 && hi == 1.0) continue;  // Binary block
    if (!is_finite(lo) && !is_finite(hi)) {
      out << " " << names.col[j] << " free\n";
    } else if (is_finite(lo) && lo == hi) {
      out << " " << names.col[j] << " = " << detail::fmt_num(lo) << "\n";
    } else {
      out << " " << (is_finite(lo) ? detail::fmt_num(lo) : "-infinity")
          << " <= " << names.col[j] << " <= "
          << (is_finite(hi) ? detail::fmt_num(hi) : "infinity") << "\n";
    }
  }
  bool any_bin = false;
  for (int j = 0; j < n; ++j) any_bin = any_bin || binary[j];
  if (any_bin) {
    out << "Binary\n";
    for (int j = 0; j < n; ++j)
      if (binary[j]) out << " " << names.col[j] << "\n";
  }
  out << "End\n";
  return out.str();
}

inline std::string export_model(const LinearProgram& lp, ModelFormat fmt,
                                const std::string& model_name = "GRIDNK") {
  MipProblem m;
  m.lp = lp;
  return export_model(m, fmt, model_name);
}

namespace detail {

struct ModelLines {
  std::vector<std::string> text;  // raw lines, index = line number - 1
};

[[noreturn]] inline void import_fail(int line_no, const std::string& why) {
  throw ConfigError("model import: line " + std::to_string(line_no) + ": " +
                    why);
}

inline double parse_model_num(const std::string& tok, int line_no) {
  if (tok == "infinity" || tok == "inf" || tok == "+infinity" || tok == "+inf")
    return kInf;
  if (tok == "-infinity" || tok == "-inf") return -kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) import_fail(line_no, "bad number '" + tok + "'");
    return v;
  } catch (const std::exception&) {
    import_fail(line_no, "bad number '" + tok + "'");
  }
}

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

inline MipProblem import_mps(const std::string& text) {
  MipProblem m;
  LinearProgram& lp = m.lp;
  lp.sense = LinearProgram::Sense::minimize;  // MPS default

  enum Section { none, name, objsense, rows, columns, rhs, ranges, bounds, done };
  Section sec = none;
  std::map<std::string, int> row_of;  // constraint rows only
  std::map<std::string, int> col_of;
  std::vector<char> row_kind;  // E/L/G/N as declared
  std::vector<double> row_rhs, row_range;
  std::vector<char> has_range;
  std::string obj_row;
  bool in_int = false;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  auto need_col = [&](const std::string& s, int ln) {
    auto it = col_of.find(s);
    if (it == col_of.end()) import_fail(ln, "unknown column '" + s + "'");
    return it->second;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '*') continue;
    if (line[0] != ' ') {  // section header
      const std::vector<std::string> f = split_ws(line);
      if (f[0] == "NAME") sec = name;
      else if (f[0] == "OBJSENSE") sec = objsense;
      else if (f[0] == "ROWS") sec = rows;
      else if (f[0] == "COLUMNS") sec = columns;
      else if (f[0] == "RHS") sec = rhs;
      else if (f[0] == "RANGES") sec = ranges;
      else if (f[0] == "BOUNDS") sec = bounds;
      else if (f[0] == "ENDATA") { sec = done; break; }
      else import_fail(line_no, "unknown section '" + f[0] + "'");
      continue;
    }
    const std::vector<std::string> f = split_ws(line);
    if (f.empty()) continue;
    switch (sec) {
      case objsense:
        if (f[0] == "MAX") lp.sense = LinearProgram::Sense::maximize;
        else if (f[0] == "MIN") lp.sense = LinearProgram::Sense::minimize;
        else import_fail(line_no, "objective sense must be MAX or MIN");
        break;
      case rows: {
        if (f.size() != 2 || f[0].size() != 1)
          import_fail(line_no, "row entries need a type and a name");
        const char t = f[0][0];
        if (t != 'N' && t != 'E' && t != 'L' && t != 'G')
          import_fail(line_no, std::string("unknown row type '") + t + "'");
        if (t == 'N' && obj_row.empty()) {
          obj_row = f[1];
          break;
        }
        if (row_of.count(f[1]) || f[1] == obj_row)
          import_fail(line_no, "duplicate row '" + f[1] + "'");
        row_of[f[1]] = static_cast<int>(row_kind.size());
        row_kind.push_back(t);
        row_rhs.push_back(0.0);
        row_range.push_back(0.0);
        has_range.push_back(0);
        lp.add_row({f[1], 0.0, 0.0, {}});  // interval fixed up at the end
        break;
      }
      case columns: {
        if (f.size() >= 3 && f[1] == "'MARKER'") {
          if (f[2] == "'INTORG'") in_int = true;
          else if (f[2] == "'INTEND'") in_int = false;
          else import_fail(line_no, "unknown marker " + f[2]);
          break;
        }
        if (f.size() < 3 || f.size() % 2 == 0)
          import_fail(line_no, "column entries need name, row, value pairs");
        int j;
        auto it = col_of.find(f[0]);
        if (it != col_of.end()) {
          j = it->second;
        } else {
          j = lp.add_var(f[0], 0.0, kInf);
          col_of[f[0]] = j;
          if (in_int) m.binaries.push_back(j);
        }
        for (std::size_t p = 1; p + 1 < f.size(); p += 2) {
          const double v = parse_model_num(f[p + 1], line_no);
          if (f[p] == obj_row) {
            lp.obj[j] += v;
          } else {
            auto rit = row_of.find(f[p]);
            if (rit == row_of.end())
              import_fail(line_no, "unknown row '" + f[p] + "'");
            lp.rows[rit->second].terms.push_back({j, v});
          }
        }
        break;
      }
      case rhs: {
        if (f.size() < 3 || f.size() % 2 == 0)
          import_fail(line_no, "rhs entries need set, row, value pairs");
        for (std::size_t p = 1; p + 1 < f.size(); p += 2) {
          const double v = parse_model_num(f[p + 1], line_no);
          if (f[p] == obj_row) {
            lp.obj_constant = -v;
          } else {
            auto rit = row_of.find(f[p]);
            if (rit == row_of.end())
              import_fail(line_no, "unknown row '" + f[p] + "'");
            row_rhs[rit->second] = v;
          }
        }
        break;
      }
      case ranges: {
        if (f.size() < 3 || f.size() % 2 == 0)
          import_fail(line_no, "range entries need set, row, value pairs");
        for (std::size_t p = 1; p + 1 < f.size(); p += 2) {
          auto rit = row_of.find(f[p]);
          if (rit == row_of.end())
            import_fail(line_no, "unknown row '" + f[p] + "'");
          row_range[rit->second] = parse_model_num(f[p + 1], line_no);
          has_range[rit->second] = 1;
        }
        break;
      }
      case bounds: {
        if (f.size() < 3)
          import_fail(line_no, "bound entries need type, set, column");
        const std::string& t = f[0];
        const int j = need_col(f[2], line_no);
        const bool needs_val = t == "UP" || t == "LO" || t == "FX";
        if (needs_val && f.size() < 4)
          import_fail(line_no, "bound type " + t + " needs a value");
        const double v = needs_val ? parse_model_num(f[3], line_no) : 0.0;
        if (t == "UP") lp.var_hi[j] = v;
        else if (t == "LO") lp.var_lo[j] = v;
        else if (t == "FX") lp.var_lo[j] = lp.var_hi[j] = v;
        else if (t == "MI") lp.var_lo[j] = -kInf;
        else if (t == "PL") lp.var_hi[j] = kInf;
        else if (t == "FR") { lp.var_lo[j] = -kInf; lp.var_hi[j] = kInf; }
        else if (t == "BV") {
          lp.var_lo[j] = 0.0;
          lp.var_hi[j] = 1.0;
          bool known = false;
          for (int b : m.binaries) known = known || b == j;
          if (!known) m.binaries.push_back(j);
        } else {
          import_fail(line_no, "unknown bound type '" + t + "'");
        }
        break;
      }
      case name:
      case none:
      case done:
        import_fail(line_no, "data outside any section");
      default:
        break;
    }
  }
  if (sec != done) import_fail(line_no, "missing ENDATA");
  if (obj_row.empty()) import_fail(line_no, "no objective row declared");

  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const double b = row_rhs[i];
    double lo, hi;
    switch (row_kind[i]) {
      case 'E': lo = hi = b; break;
      case 'L': lo = -kInf; hi = b; break;
      case 'G': lo = b; hi = kInf; break;
      default:  lo = -kInf; hi = kInf; break;  // free row
    }
    if (has_range[i]) {
      const double r = row_range[i];
      if (row_kind[i] == 'L') lo = b - std::fabs(r);
      else if (row_kind[i] == 'G') hi = b + std::fabs(r);
      else if (row_kind[i] == 'E') { lo = r >= 0 ? b : b - std::fabs(r);
                                     hi = r >= 0 ? b + r : b; }
    }
    lp.rows[i].lo = lo;
    lp.rows[i].hi = hi;
  }
  lp.validate();
  return m;
}

// One linear expression: signed coefficient-name terms plus a constant.
struct LpExpr {
  std::vector<std::pair<std::string, double>> terms;
  double constant = 0.0;
};

inline bool token_is_number(const std::string& t) {
  if (t == "infinity" || t == "-infinity" || t == "inf" || t == "-inf")
    return true;
  char* end = nullptr;
  std::strtod(t.c_str(), &end);
  return end && *end == '\0' && end != t.c_str();
}

inline LpExpr parse_lp_expr(const std::vector<std::string>& toks,
                            std::size_t from, std::size_t to, int line_no,
                            bool allow_constant) {
  LpExpr e;
  double sign = 1.0;
  bool have_coeff = false;
  double coeff = 1.0;
  for (std::size_t i = from; i < to; ++i) {
    const std::string& t = toks[i];
    if (t == "+" || t == "-") {
      if (have_coeff) import_fail(line_no, "dangling coefficient");
      sign = (t == "-") ? -sign : sign;
    } else if (token_is_number(t)) {
      if (have_coeff) {
        // Two numbers in a row: the first was a constant term.
        if (!allow_constant)
          import_fail(line_no, "constant term not allowed here");
        e.constant += sign * coeff;
        sign = 1.0;
      }
      coeff = parse_model_num(t, line_no);
      have_coeff = true;
    } else {
      e.terms.push_back({t, sign * (have_coeff ? coeff : 1.0)});
      sign = 1.0;
      have_coeff = false;
      coeff = 1.0;
    }
  }
  if (have_coeff) {
    if (!allow_constant)
      import_fail(line_no, "constant term not allowed here");
    e.constant += sign * coeff;
  }
  return e;
}

inline MipProblem import_lp_text(const std::string& text) {
  MipProblem m;
  LinearProgram& lp = m.lp;
  std::map<std::string, int> col_of;
  auto col = [&](const std::string& s) {
    auto it = col_of.find(s);
    if (it != col_of.end()) return it->second;
    const int j = lp.add_var(s, 0.0, kInf);
    col_of[s] = j;
    return j;
  };

  enum Section { none, objective, subject_to, bounds, binary, done };
  Section sec = none;
  bool have_obj = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::map<std::string, int> row_names;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' '))
      trimmed.pop_back();
    std::size_t at = trimmed.find_first_not_of(' ');
    if (at == std::string::npos) continue;
    if (trimmed[0] != ' ') {  // section keyword line
      if (trimmed == "Maximize") { sec = objective; lp.sense = LinearProgram::Sense::maximize; }
      else if (trimmed == "Minimize") { sec = objective; lp.sense = LinearProgram::Sense::minimize; }
      else if (trimmed == "Subject To") sec = subject_to;
      else if (trimmed == "Bounds") sec = bounds;
      else if (trimmed == "Binary") sec = binary;
      else if (trimmed == "End") { sec = done; break; }
      else import_fail(line_no, "unknown section '" + trimmed + "'");
      continue;
    }
    std::vector<std::string> toks = split_ws(trimmed);
    switch (sec) {
      case objective: {
        if (have_obj) import_fail(line_no, "second objective line");
        have_obj = true;
        if (toks.empty() || toks[0].back() != ':')
          import_fail(line_no, "objective needs a 'name:' prefix");
        const LpExpr e = parse_lp_expr(toks, 1, toks.size(), line_no, true);
        lp.obj_constant = e.constant;
        for (const auto& [name, c] : e.terms) lp.obj[col(name)] += c;
        break;
      }
      case subject_to: {
        if (toks.empty() || toks[0].back() != ':')
          import_fail(line_no, "constraint needs a 'name:' prefix");
        std::string rname = toks[0].substr(0, toks[0].size() - 1);
        if (rname.empty()) import_fail(line_no, "empty constraint name");
        if (!row_names.emplace(rname, line_no).second)
          import_fail(line_no, "duplicate constraint '" + rname + "'");
        // Find relations; accept "expr rel num" and "num rel expr rel num".
        std::vector<std::size_t> rel;
        for (std::size_t i = 1; i < toks.size(); ++i)
          if (toks[i] == "<=" || toks[i] == ">=" || toks[i] == "=")
            rel.push_back(i);
        if (rel.empty()) import_fail(line_no, "constraint has no relation");
        double lo = -kInf, hi = kInf;
        std::size_t expr_from = 1, expr_to = toks.size();
        if (rel.size() == 1) {
          const std::size_t r = rel[0];
          if (r + 1 >= toks.size() || !token_is_number(toks[r + 1]))
            import_fail(line_no, "relation needs a numeric right side");
          const double b = parse_model_num(toks[r + 1], line_no);
          expr_to = r;
          if (toks[r] == "<=") hi = b;
          else if (toks[r] == ">=") lo = b;
          else lo = hi = b;
        } else if (rel.size() == 2 && toks[rel[0]] == "<=" &&
                   toks[rel[1]] == "<=" && rel[0] == 2 &&
                   token_is_number(toks[1])) {
          lo = parse_model_num(toks[1], line_no);
          if (rel[1] + 1 >= toks.size() || !token_is_number(toks[rel[1] + 1]))
            import_fail(line_no, "ranged row needs a numeric right side");
          hi = parse_model_num(toks[rel[1] + 1], line_no);
          expr_from = rel[0] + 1;
          expr_to = rel[1];
        } else {
          import_fail(line_no, "unsupported relation layout");
        }
        const LpExpr e =
            parse_lp_expr(toks, expr_from, expr_to, line_no, false);
        LpRow row{rname, lo, hi, {}};
        std::map<int, double> acc;
        for (const auto& [name, c] : e.terms) acc[col(name)] += c;
        for (const auto& [j, c] : acc) row.terms.push_back({j, c});
        lp.add_row(std::move(row));
        break;
      }
      case bounds: {
        if (toks.size() == 2 && toks[1] == "free") {
          const int j = col(toks[0]);
          lp.var_lo[j] = -kInf;
          lp.var_hi[j] = kInf;
        } else if (toks.size() == 3 && toks[1] == "=") {
          const int j = col(toks[0]);
          lp.var_lo[j] = lp.var_hi[j] = parse_model_num(toks[2], line_no);
        } else if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
          const int j = col(toks[2]);
          lp.var_lo[j] = parse_model_num(toks[0], line_no);
          lp.var_hi[j] = parse_model_num(toks[4], line_no);
        } else if (toks.size() == 3 && toks[1] == "<=") {
          lp.var_hi[col(toks[0])] = parse_model_num(toks[2], line_no);
        } else if (toks.size() == 3 && toks[1] == ">=") {
          lp.var_lo[col(toks[0])] = parse_model_num(toks[2], line_no);
        } else {
          import_fail(line_no, "unsupported bound line");
        }
        break;
      }
      case binary: {
        for (const std::string& t : toks) {
          const int j = col(t);
          lp.var_lo[j] = 0.0;
          lp.var_hi[j] = 1.0;
          bool known = false;
          for (int b : m.binaries) known = known || b == j;
          if (!known) m.binaries.push_back(j);
        }
        break;
      }
      case none:
      case done:
        import_fail(line_no, "data outside any section");
    }
  }
  if (sec != done) import_fail(line_no, "missing End");
  if (!have_obj) import_fail(line_no, "no objective found");
  lp.validate();
  return m;
}

}  // namespace detail

inline MipProblem import_model(const std::string& text, ModelFormat fmt) {
  return fmt == ModelFormat::mps ? detail::import_mps(text)
                                 : detail::import_lp_text(text);
}

}  // namespace gridnk
