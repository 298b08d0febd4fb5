// SPDX-License-Identifier: Apache-2.0
//
// gridnk — command-line surface of the stochastic N-k interdiction toolkit.
//
// Subcommands:
//   scenarios  generate an outage scenario file (geo-cluster + Bernoulli)
//   solve      find the worst-case attack (cutplane | enumerate | milp-export)
//   export     write the one-shot interdiction MILP as MPS / LP text
//   vss        value-of-the-stochastic-solution report
//   saa        batched sample-average study with a 95% confidence interval
//   validate   dry-run checks of network / scenario / model files (no output)
//
// Every option may also come from a JSON config file (--config FILE) whose
// keys are the long option names without the leading dashes; explicit flags
// win over config values. Every artifact-producing run writes manifest.json
// (command, resolved config, artifact list, wall time) into the output
// directory. All artifacts except manifest.json and summary.csv — the two
// that record wall-clock time — are byte-reproducible from the same inputs
// and seed.
//
// Exit codes: 0 success, 1 configuration error, 2 solver failure,
// 3 work-cap exceeded.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gridnk/analysis.hpp"
#include "gridnk/common.hpp"
#include "gridnk/cutplane.hpp"
#include "gridnk/enumerate.hpp"
#include "gridnk/loadshed.hpp"
#include "gridnk/matpower.hpp"
#include "gridnk/model_io.hpp"
#include "gridnk/network.hpp"
#include "gridnk/network_json.hpp"
#include "gridnk/scenario.hpp"
#include "gridnk/singlelevel.hpp"
#include "gridnk/threads.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;
using OJson = nlohmann::ordered_json;
using namespace gridnk;

namespace {

constexpr const char* kVersion = "0.1.0";

// --- file helpers -----------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& content) {
  const fs::path parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) fs::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
  if (!out) throw ConfigError("cannot write file: " + path);
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

// --- config-file plumbing ---------------------------------------------------

// Registers options on a subcommand and remembers how to fill each one from
// a JSON config object when the command line left it unset.
class Flags {
 public:
  explicit Flags(CLI::App* cmd) : cmd_(cmd) {
    cmd_->add_option("--config", config_path_,
                     "JSON file with defaults for the long options "
                     "(explicit flags win)");
  }

  template <typename T>
  CLI::Option* add(const std::string& flag, T& slot, const std::string& help) {
    CLI::Option* opt = cmd_->add_option(flag, slot, help);
    const std::string key = long_name(flag);
    keys_.insert(key);
    fills_.emplace_back(key, opt, [&slot, key](const Json& v) {
      try {
        slot = v.get<T>();
      } catch (const Json::exception&) {
        throw ConfigError("config: key \"" + key + "\" has the wrong type");
      }
    });
    return opt;
  }

  const std::set<std::string>& keys() const { return keys_; }

  // Loads the config file (when given) and fills every option the command
  // line did not set. Keys must be known to some subcommand; keys known only
  // to other subcommands are ignored here so one file can drive a study.
  void apply(const std::set<std::string>& known_everywhere) {
    if (config_path_.empty()) return;
    const Json root = Json::parse(read_file(config_path_), nullptr, false);
    if (root.is_discarded())
      throw ConfigError("config: " + config_path_ + " is not valid JSON");
    if (!root.is_object())
      throw ConfigError("config: " + config_path_ +
                        " must hold one JSON object");
    for (const auto& item : root.items())
      if (!known_everywhere.count(item.key()))
        throw ConfigError("config: unknown key \"" + item.key() + "\"");
    for (const auto& [key, opt, fill] : fills_)
      if (opt->count() == 0 && root.contains(key)) fill(root.at(key));
  }

 private:
  // "-k,--k" -> "k"; takes the last long name in the flag spec.
  static std::string long_name(const std::string& flag) {
    std::string last;
    std::stringstream ss(flag);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (tok.rfind("--", 0) == 0) last = tok.substr(2);
    if (last.empty())
      throw Error("option \"" + flag + "\" needs a long name");
    return last;
  }

  CLI::App* cmd_;
  std::string config_path_;
  std::set<std::string> keys_;
  std::vector<std::tuple<std::string, CLI::Option*,
                         std::function<void(const Json&)>>>
      fills_;
};

// --- shared option bundles --------------------------------------------------

struct CommonOpts {
  std::string net;
  std::string output_dir = ".";
  int threads = 0;  // 0: use the logical core count
};

void add_common(Flags& f, CommonOpts& o, bool with_threads = true) {
  f.add("--net", o.net, "network file (.json, or MATPOWER-style .m)");
  f.add("--output-dir", o.output_dir, "directory for artifacts (default .)");
  if (with_threads)
    f.add("--threads", o.threads,
          "concurrent per-scenario solves (default: logical cores)");
}

struct SourceOpts {
  std::string scenarios;  // path to a scenario JSON file
  int gen_count = 0;      // > 0: generate this many scenarios instead
  int clusters = 1;
  int cluster = 0;
  int outage_lo = 1;
  int outage_hi = 2;
  double bernoulli_p = 0.0;  // <= 0: automatic
};

void add_source(Flags& f, SourceOpts& o) {
  f.add("--scenarios", o.scenarios, "scenario JSON file");
  f.add("--gen-count", o.gen_count,
        "generate this many scenarios instead of reading a file");
  f.add("--clusters", o.clusters, "bus clusters for generation (default 1)");
  f.add("--cluster", o.cluster, "cluster index to draw outages from");
  f.add("--outage-lo", o.outage_lo, "minimum outages per scenario");
  f.add("--outage-hi", o.outage_hi, "maximum outages per scenario");
  f.add("--bernoulli-p", o.bernoulli_p,
        "per-component outage probability (default: automatic)");
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

Network load_network(const std::string& path) {
  if (path.empty()) throw ConfigError("--net is required");
  const std::string text = read_file(path);
  if (fs::path(path).extension() == ".m") return parse_matpower_case(text);
  return parse_network_json(text);
}

// Exactly one scenario source: a file, or generation parameters + seed.
// Returns the normalized set and whether it was generated here.
std::pair<ScenarioSet, bool> resolve_scenarios(const Network& net,
                                               const SourceOpts& src,
                                               std::uint64_t seed) {
  if (!src.scenarios.empty() && src.gen_count > 0)
    throw ConfigError("give either --scenarios or --gen-count, not both");
  if (!src.scenarios.empty()) {
    ScenarioSet ss = parse_scenarios_json(read_file(src.scenarios), net);
    return {normalize(std::move(ss)), false};
  }
  if (src.gen_count > 0) {
    ScenarioSet ss = generate_scenarios(
        net, src.clusters, src.cluster, src.gen_count,
        {src.outage_lo, src.outage_hi}, src.bernoulli_p, seed);
    return {std::move(ss), true};
  }
  throw ConfigError("no scenario source: give --scenarios FILE or "
                    "--gen-count N");
}

// --- artifact builders ------------------------------------------------------

OJson plan_json(const InterdictionPlan& plan) {
  std::vector<std::string> lines = plan.attacked_lines;
  std::vector<std::string> gens = plan.attacked_gens;
  std::sort(lines.begin(), lines.end());
  std::sort(gens.begin(), gens.end());
  OJson j;
  j["lines"] = lines;
  j["gens"] = gens;
  return j;
}

// Per-scenario dispatch under the final plan: total shed plus the per-bus
// shed map (demand buses only), the plot-ready form of the results.
OJson per_scenario_json(const Network& net, const ScenarioSet& ss,
                        const InterdictionPlan& plan, int threads) {
  const long n = static_cast<long>(ss.scenarios.size());
  std::vector<double> shed(n, 0.0);
  std::vector<std::map<std::string, double>> frac(n);
  parallel_for(n, threads, [&](long i) {
    DispatchSolution d = solve_inner(net, ss.scenarios[i], plan);
    shed[i] = d.shed_total_mw;
    frac[i] = std::move(d.shed_frac);
  });
  OJson arr = OJson::array();
  for (long i = 0; i < n; ++i) {
    OJson row;
    row["id"] = ss.scenarios[i].id;
    row["weight"] = ss.scenarios[i].weight;
    row["shed_mw"] = shed[i];
    OJson by_bus;
    for (const Bus& b : net.buses) {
      if (b.demand_mw <= 0.0) continue;
      const auto it = frac[i].find(b.id);
      by_bus[b.id] = (it == frac[i].end() ? 0.0 : it->second) * b.demand_mw;
    }
    row["shed_by_bus"] = std::move(by_bus);
    arr.push_back(std::move(row));
  }
  return arr;
}

void write_manifest(const std::string& dir, const char* command,
                    const OJson& config, const std::vector<std::string>& files,
                    double wall_sec) {
  OJson m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = config;
  m["artifacts"] = files;
  m["wall_time_sec"] = wall_sec;
  write_file(dir + "/manifest.json", m.dump(2) + "\n");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// --- method / format parsing -------------------------------------------------

enum class RunMethod { cutplane, enumerate_all, milp_export };

RunMethod parse_method(const std::string& s) {
  if (s == "cutplane") return RunMethod::cutplane;
  if (s == "enumerate") return RunMethod::enumerate_all;
  if (s == "milp-export") return RunMethod::milp_export;
  throw ConfigError("unknown method \"" + s +
                    "\" (expected cutplane | enumerate | milp-export)");
}

SolveMethod parse_analysis_method(const std::string& s) {
  if (s == "cutplane") return SolveMethod::cutplane;
  if (s == "enumerate") return SolveMethod::enumeration;
  throw ConfigError("unknown method \"" + s +
                    "\" (expected cutplane | enumerate)");
}

DualBoundPolicy parse_bounds(const std::string& s) {
  if (s == "cap") return DualBoundPolicy::fixed_cap;
  if (s == "probe") return DualBoundPolicy::probe_lp;
  throw ConfigError("unknown dual-bounds policy \"" + s +
                    "\" (expected cap | probe)");
}

const char* status_name(CutPlaneResult::Status s) {
  switch (s) {
    case CutPlaneResult::Status::converged:
      return "converged";
    case CutPlaneResult::Status::iter_limit:
      return "iter_limit";
    case CutPlaneResult::Status::stalled:
      return "stalled";
  }
  return "unknown";
}

// --- scenarios ---------------------------------------------------------------

struct ScenariosCmd {
  CommonOpts common;
  SourceOpts src;  // only the generation half is used
  int count = -1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_scenarios(const ScenariosCmd& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Network net = load_network(c.common.net);
  if (c.count < 1) throw ConfigError("--count must be >= 1");
  const ScenarioSet ss = generate_scenarios(
      net, c.src.clusters, c.src.cluster, c.count,
      {c.src.outage_lo, c.src.outage_hi}, c.src.bernoulli_p, c.seed);

  const std::string out =
      c.out.empty() ? c.common.output_dir + "/scenarios.json" : c.out;
  write_file(out, serialize_scenarios_json(ss));

  const std::string manifest_dir =
      c.out.empty() ? c.common.output_dir
                    : fs::path(c.out).parent_path().empty()
                          ? std::string(".")
                          : fs::path(c.out).parent_path().string();
  OJson cfg;
  cfg["net"] = c.common.net;
  cfg["count"] = c.count;
  cfg["clusters"] = c.src.clusters;
  cfg["cluster"] = c.src.cluster;
  cfg["outage-lo"] = c.src.outage_lo;
  cfg["outage-hi"] = c.src.outage_hi;
  cfg["bernoulli-p"] = c.src.bernoulli_p;
  cfg["seed"] = c.seed;
  cfg["out"] = out;
  write_manifest(manifest_dir, "scenarios", cfg, {out}, seconds_since(t0));

  std::cout << "wrote " << ss.scenarios.size() << " scenarios to " << out
            << "\n";
  return 0;
}

// --- export (also backs solve --method milp-export) --------------------------

struct ExportCmd {
  CommonOpts common;
  SourceOpts src;
  int k = -1;
  std::string format = "both";  // mps | lp | both
  std::string dual_bounds = "cap";
  std::string model_name = "GRIDNK";
  std::uint64_t seed = 1;
};

std::vector<std::string> export_models(const Network& net,
                                       const ScenarioSet& ss, const ExportCmd& c,
                                       std::vector<std::string>* notes) {
  if (c.format != "mps" && c.format != "lp" && c.format != "both")
    throw ConfigError("unknown format \"" + c.format +
                      "\" (expected mps | lp | both)");
  const DualBoundPolicy policy = parse_bounds(c.dual_bounds);
  const SingleLevelModel model = build_single_level_milp(net, ss, c.k, policy);
  if (notes) *notes = model.bounds.notes;

  std::vector<std::string> files;
  if (c.format == "mps" || c.format == "both") {
    const std::string path = c.common.output_dir + "/model.mps";
    write_file(path, export_model(model.mip, ModelFormat::mps, c.model_name));
    files.push_back(path);
  }
  if (c.format == "lp" || c.format == "both") {
    const std::string path = c.common.output_dir + "/model.lp";
    write_file(path,
               export_model(model.mip, ModelFormat::lp_text, c.model_name));
    files.push_back(path);
  }
  std::cout << "model: " << model.mip.lp.num_rows() << " rows, "
            << model.mip.lp.num_vars() << " columns, "
            << model.mip.binaries.size() << " binaries\n";
  for (const std::string& f : files) std::cout << "wrote " << f << "\n";
  return files;
}

int run_export(const ExportCmd& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Network net = load_network(c.common.net);
  if (c.k < 0) throw ConfigError("--k must be given and >= 0");
  auto [ss, generated] = resolve_scenarios(net, c.src, c.seed);

  std::vector<std::string> files;
  if (generated) {
    const std::string path = c.common.output_dir + "/scenarios.json";
    write_file(path, serialize_scenarios_json(ss));
    files.push_back(path);
  }
  std::vector<std::string> notes;
  std::vector<std::string> models = export_models(net, ss, c, &notes);
  files.insert(files.end(), models.begin(), models.end());
  for (const std::string& n : notes) std::cerr << "note: " << n << "\n";

  OJson cfg;
  cfg["net"] = c.common.net;
  cfg["scenarios"] = c.src.scenarios;
  cfg["gen-count"] = c.src.gen_count;
  cfg["k"] = c.k;
  cfg["format"] = c.format;
  cfg["dual-bounds"] = c.dual_bounds;
  cfg["model-name"] = c.model_name;
  cfg["seed"] = c.seed;
  write_manifest(c.common.output_dir, "export", cfg, files, seconds_since(t0));
  return 0;
}

// --- solve --------------------------------------------------------------------

struct SolveCmd {
  CommonOpts common;
  SourceOpts src;
  int k = -1;
  std::string method = "cutplane";
  double eps = 1e-4;
  int iter_limit = 200;
  long eval_cap = 1000000;
  std::uint64_t seed = 1;
  std::string out;
  // milp-export extras
  std::string format = "both";
  std::string dual_bounds = "cap";
  std::string model_name = "GRIDNK";
};

int run_solve(const SolveCmd& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Network net = load_network(c.common.net);
  if (c.k < 0) throw ConfigError("--k must be given and >= 0");
  const RunMethod method = parse_method(c.method);
  const int threads = resolve_threads(c.common.threads);

  const std::string out_dir =
      !c.out.empty()
          ? (fs::path(c.out).parent_path().empty()
                 ? std::string(".")
                 : fs::path(c.out).parent_path().string())
          : c.common.output_dir;
  const std::string solution_path =
      c.out.empty() ? out_dir + "/solution.json" : c.out;

  auto [ss, generated] = resolve_scenarios(net, c.src, c.seed);
  std::vector<std::string> files;
  if (generated) {
    const std::string path = out_dir + "/scenarios.json";
    write_file(path, serialize_scenarios_json(ss));
    files.push_back(path);
  }

  OJson cfg;
  cfg["net"] = c.common.net;
  cfg["scenarios"] = c.src.scenarios;
  cfg["gen-count"] = c.src.gen_count;
  cfg["k"] = c.k;
  cfg["method"] = c.method;
  cfg["eps"] = c.eps;
  cfg["iter-limit"] = c.iter_limit;
  cfg["eval-cap"] = c.eval_cap;
  cfg["seed"] = c.seed;
  cfg["threads"] = threads;

  if (method == RunMethod::milp_export) {
    ExportCmd e;
    e.common = c.common;
    e.common.output_dir = out_dir;
    e.src = c.src;
    e.k = c.k;
    e.format = c.format;
    e.dual_bounds = c.dual_bounds;
    e.model_name = c.model_name;
    e.seed = c.seed;
    std::vector<std::string> models = export_models(net, ss, e, nullptr);
    files.insert(files.end(), models.begin(), models.end());
    write_manifest(out_dir, "solve", cfg, files, seconds_since(t0));
    return 0;
  }

  InterdictionPlan plan;
  double z_lb = 0.0, z_ub = 0.0;
  std::string status;
  std::string trace;
  int iterations = 0;
  long cuts = 0, evaluated = 0;

  if (method == RunMethod::cutplane) {
    CutPlaneOptions opts;
    opts.eps = c.eps;
    opts.iter_limit = c.iter_limit;
    opts.n_threads = threads;
    const CutPlaneResult res = run_cutting_plane(net, ss, c.k, opts);
    plan = res.state.incumbent;
    z_lb = res.state.z_lb;
    z_ub = res.state.history.empty() ? res.state.z_ub
                                     : res.state.history.back().z_ub_min;
    status = status_name(res.status);
    iterations = res.state.iteration;
    cuts = static_cast<long>(res.state.cuts.size());
    std::ostringstream lines;
    for (const CutPlaneHistoryEntry& e : res.state.history) {
      OJson row;
      row["iter"] = e.iter;
      row["z_lb_mw"] = e.z_lb;
      row["z_ub_mw"] = e.z_ub;
      row["z_ub_min_mw"] = e.z_ub_min;
      row["evaluated"] = plan_json(e.evaluated);
      row["proposed"] = plan_json(e.proposed);
      lines << row.dump() << "\n";
    }
    trace = lines.str();
  } else {
    EnumerateOptions opts;
    opts.eval_cap = c.eval_cap;
    opts.n_threads = threads;
    const EnumerationResult res = enumerate_exact(net, ss, c.k, opts);
    plan = res.best_plan;
    z_lb = z_ub = res.best_value;
    status = "exact";
    evaluated = res.evaluated;
  }

  OJson sol;
  sol["network"] = c.common.net;
  sol["k"] = c.k;
  sol["method"] = c.method;
  sol["status"] = status;
  sol["plan"] = plan_json(plan);
  sol["objective_mw"] = z_lb;
  sol["z_lb_mw"] = z_lb;
  sol["z_ub_mw"] = z_ub;
  if (method == RunMethod::cutplane) {
    sol["iterations"] = iterations;
    sol["cuts"] = cuts;
  } else {
    sol["evaluated_plans"] = evaluated;
  }
  sol["per_scenario"] = per_scenario_json(net, ss, plan, threads);
  write_file(solution_path, sol.dump(2) + "\n");
  files.push_back(solution_path);

  const std::string trace_path = out_dir + "/trace.jsonl";
  write_file(trace_path, trace);
  files.push_back(trace_path);

  const double wall = seconds_since(t0);
  {
    char row[160];
    std::snprintf(row, sizeof row, "%d,%.3f,%s\n", c.k, wall,
                  num(z_lb).c_str());
    write_file(out_dir + "/summary.csv",
               std::string("k,time_sec,obj_mw\n") + row);
    files.push_back(out_dir + "/summary.csv");
  }
  write_manifest(out_dir, "solve", cfg, files, wall);

  char line[256];
  std::snprintf(line, sizeof line,
                "k=%d method=%s status=%s objective=%.10g MW "
                "(z_lb=%.10g, z_ub=%.10g) wall=%.3fs\n",
                c.k, c.method.c_str(), status.c_str(), z_lb, z_lb, z_ub, wall);
  std::cout << line << "artifacts in " << out_dir << "\n";
  return 0;
}

// --- vss ----------------------------------------------------------------------

struct VssCmd {
  CommonOpts common;
  SourceOpts src;
  int k = -1;
  std::string method = "enumerate";
  double eps = 1e-4;
  int iter_limit = 200;
  long eval_cap = 1000000;
  std::uint64_t seed = 1;
};

int run_vss(const VssCmd& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Network net = load_network(c.common.net);
  if (c.k < 0) throw ConfigError("--k must be given and >= 0");
  const SolveMethod method = parse_analysis_method(c.method);
  const int threads = resolve_threads(c.common.threads);
  auto [ss, generated] = resolve_scenarios(net, c.src, c.seed);

  std::vector<std::string> files;
  if (generated) {
    const std::string path = c.common.output_dir + "/scenarios.json";
    write_file(path, serialize_scenarios_json(ss));
    files.push_back(path);
  }

  AnalysisOptions ao;
  ao.n_threads = threads;
  ao.enumerate.eval_cap = c.eval_cap;
  ao.enumerate.n_threads = threads;
  ao.cutplane.eps = c.eps;
  ao.cutplane.iter_limit = c.iter_limit;
  ao.cutplane.n_threads = threads;
  const VssReport rep = compute_vss(net, ss, c.k, method, ao);

  OJson j;
  j["k"] = c.k;
  j["method"] = c.method;
  j["z_mw"] = rep.z;
  j["eev_mw"] = rep.eev;
  j["vss_mw"] = rep.vss;
  j["vss_pct_of_z"] = rep.vss_pct;
  j["evp_plan"] = plan_json(rep.evp_plan);
  write_file(c.common.output_dir + "/vss.json", j.dump(2) + "\n");
  files.push_back(c.common.output_dir + "/vss.json");

  write_file(c.common.output_dir + "/vss.csv",
             "k,z_mw,eev_mw,vss_mw,vss_pct_of_z\n" + std::to_string(c.k) +
                 "," + num(rep.z) + "," + num(rep.eev) + "," + num(rep.vss) +
                 "," + num(rep.vss_pct) + "\n");
  files.push_back(c.common.output_dir + "/vss.csv");

  OJson cfg;
  cfg["net"] = c.common.net;
  cfg["scenarios"] = c.src.scenarios;
  cfg["gen-count"] = c.src.gen_count;
  cfg["k"] = c.k;
  cfg["method"] = c.method;
  cfg["seed"] = c.seed;
  cfg["threads"] = threads;
  write_manifest(c.common.output_dir, "vss", cfg, files, seconds_since(t0));

  char line[200];
  std::snprintf(line, sizeof line,
                "k=%d z=%.10g MW eev=%.10g MW vss=%.10g MW (%.4g%%)\n", c.k,
                rep.z, rep.eev, rep.vss, rep.vss_pct);
  std::cout << line;
  return 0;
}

// --- saa ----------------------------------------------------------------------

struct SaaCmd {
  CommonOpts common;
  SourceOpts src;
  int k = -1;
  int batches = -1;
  std::string method = "enumerate";
  double eps = 1e-4;
  int iter_limit = 200;
  long eval_cap = 1000000;
  std::uint64_t seed = 1;
};

int run_saa(const SaaCmd& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const Network net = load_network(c.common.net);
  if (c.k < 0) throw ConfigError("--k must be given and >= 0");
  if (c.batches < 2) throw ConfigError("--batches must be >= 2");
  const SolveMethod method = parse_analysis_method(c.method);
  const int threads = resolve_threads(c.common.threads);
  auto [ss, generated] = resolve_scenarios(net, c.src, c.seed);

  std::vector<std::string> files;
  if (generated) {
    const std::string path = c.common.output_dir + "/scenarios.json";
    write_file(path, serialize_scenarios_json(ss));
    files.push_back(path);
  }

  AnalysisOptions ao;
  ao.n_threads = threads;        // batches run in parallel
  ao.enumerate.eval_cap = c.eval_cap;
  ao.cutplane.eps = c.eps;
  ao.cutplane.iter_limit = c.iter_limit;
  const SaaReport rep =
      saa_batches(net, ss, c.k, c.batches, method, c.seed, ao);

  OJson j;
  j["k"] = c.k;
  j["method"] = c.method;
  j["seed"] = c.seed;
  j["n_batches"] = c.batches;
  j["batch_values_mw"] = rep.batch_values;
  j["mean_mw"] = rep.mean;
  j["ci95_halfwidth_mw"] = rep.ci95_halfwidth;
  j["best_plan"] = plan_json(rep.best_plan_overall);
  j["full_set_value_of_best_mw"] = rep.full_set_value_of_best;
  write_file(c.common.output_dir + "/saa.json", j.dump(2) + "\n");
  files.push_back(c.common.output_dir + "/saa.json");

  std::string csv = "batch,value_mw\n";
  for (std::size_t b = 0; b < rep.batch_values.size(); ++b)
    csv += std::to_string(b + 1) + "," + num(rep.batch_values[b]) + "\n";
  write_file(c.common.output_dir + "/saa.csv", csv);
  files.push_back(c.common.output_dir + "/saa.csv");

  OJson cfg;
  cfg["net"] = c.common.net;
  cfg["scenarios"] = c.src.scenarios;
  cfg["gen-count"] = c.src.gen_count;
  cfg["k"] = c.k;
  cfg["batches"] = c.batches;
  cfg["method"] = c.method;
  cfg["seed"] = c.seed;
  cfg["threads"] = threads;
  write_manifest(c.common.output_dir, "saa", cfg, files, seconds_since(t0));

  char line[220];
  std::snprintf(line, sizeof line,
                "k=%d batches=%d mean=%.10g MW ci95=±%.10g MW "
                "best_full_set=%.10g MW\n",
                c.k, c.batches, rep.mean, rep.ci95_halfwidth,
                rep.full_set_value_of_best);
  std::cout << line;
  return 0;
}

// --- validate -------------------------------------------------------------------

struct ValidateCmd {
  CommonOpts common;  // output_dir unused: dry run writes nothing
  std::string scenarios;
  std::string model;
  std::string model_format;  // mps | lp; default from extension
};

int run_validate(const ValidateCmd& c) {
  const Network net = load_network(c.common.net);
  int with_coords = 0;
  for (const Bus& b : net.buses) with_coords += b.coord ? 1 : 0;
  std::cout << "network: " << c.common.net << "\n  buses=" << net.buses.size()
            << " lines=" << net.lines.size()
            << " generators=" << net.generators.size()
            << " total_demand=" << num(total_demand(net))
            << " MW base=" << num(net.base_mva)
            << " angle_bound=" << num(net.angle_bound_rad) << " rad"
            << " coords=" << with_coords << "/" << net.buses.size() << "\n";

  if (!c.scenarios.empty()) {
    const ScenarioSet ss = parse_scenarios_json(read_file(c.scenarios), net);
    double w = 0.0;
    for (const Scenario& s : ss.scenarios) w += s.weight;
    std::cout << "scenarios: " << c.scenarios << "\n  count="
              << ss.scenarios.size() << " weight_sum=" << num(w)
              << (std::fabs(w - 1.0) <= 1e-6 ? " (normalized)"
                                             : " (will be renormalized)")
              << "\n";
  }

  if (!c.model.empty()) {
    ModelFormat fmt;
    std::string kind = c.model_format;
    if (kind.empty()) {
      const std::string ext = fs::path(c.model).extension().string();
      kind = ext == ".mps" ? "mps" : ext == ".lp" ? "lp" : "";
    }
    if (kind == "mps")
      fmt = ModelFormat::mps;
    else if (kind == "lp")
      fmt = ModelFormat::lp_text;
    else
      throw ConfigError("cannot tell the model format of " + c.model +
                        "; pass --model-format mps|lp");
    const MipProblem m = import_model(read_file(c.model), fmt);
    std::cout << "model: " << c.model << "\n  rows=" << m.lp.num_rows()
              << " columns=" << m.lp.num_vars()
              << " binaries=" << m.binaries.size() << "\n";
  }
  std::cout << "validate: OK\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic N-k grid interdiction toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ScenariosCmd sc;
  CLI::App* sc_cmd = app.add_subcommand(
      "scenarios", "generate an outage scenario file");
  Flags sc_flags(sc_cmd);
  add_common(sc_flags, sc.common, /*with_threads=*/false);
  sc_flags.add("--count", sc.count, "number of scenarios to draw");
  sc_flags.add("--clusters", sc.src.clusters, "bus clusters (default 1)");
  sc_flags.add("--cluster", sc.src.cluster, "cluster index to draw from");
  sc_flags.add("--outage-lo", sc.src.outage_lo, "minimum outages per scenario");
  sc_flags.add("--outage-hi", sc.src.outage_hi, "maximum outages per scenario");
  sc_flags.add("--bernoulli-p", sc.src.bernoulli_p,
               "per-component outage probability (default: automatic)");
  sc_flags.add("--seed", sc.seed, "random seed (default 1)");
  sc_flags.add("--out", sc.out,
               "scenario file path (default <output-dir>/scenarios.json)");

  SolveCmd so;
  CLI::App* so_cmd = app.add_subcommand(
      "solve", "find the worst-case attack within the budget");
  Flags so_flags(so_cmd);
  add_common(so_flags, so.common);
  add_source(so_flags, so.src);
  so_flags.add("-k,--k", so.k, "attack budget (required, >= 0)");
  so_flags.add("--method", so.method,
               "cutplane | enumerate | milp-export (default cutplane)");
  so_flags.add("--eps", so.eps, "relative gap target (default 1e-4)");
  so_flags.add("--iter-limit", so.iter_limit,
               "cutting-plane iteration cap (default 200)");
  so_flags.add("--eval-cap", so.eval_cap,
               "enumeration work cap in plan-scenario solves");
  so_flags.add("--seed", so.seed, "seed for scenario generation (default 1)");
  so_flags.add("--out", so.out,
               "solution file path (default <output-dir>/solution.json)");
  so_flags.add("--format", so.format, "milp-export format: mps | lp | both");
  so_flags.add("--dual-bounds", so.dual_bounds,
               "milp-export dual box policy: cap | probe");
  so_flags.add("--model-name", so.model_name, "milp-export model name");

  ExportCmd ex;
  CLI::App* ex_cmd = app.add_subcommand(
      "export", "write the one-shot interdiction MILP as MPS / LP text");
  Flags ex_flags(ex_cmd);
  add_common(ex_flags, ex.common, /*with_threads=*/false);
  add_source(ex_flags, ex.src);
  ex_flags.add("-k,--k", ex.k, "attack budget (required, >= 0)");
  ex_flags.add("--format", ex.format, "mps | lp | both (default both)");
  ex_flags.add("--dual-bounds", ex.dual_bounds,
               "dual box policy: cap | probe (default cap)");
  ex_flags.add("--model-name", ex.model_name, "model name in the file header");
  ex_flags.add("--seed", ex.seed, "seed for scenario generation (default 1)");

  VssCmd vs;
  CLI::App* vs_cmd = app.add_subcommand(
      "vss", "value of the stochastic solution report");
  Flags vs_flags(vs_cmd);
  add_common(vs_flags, vs.common);
  add_source(vs_flags, vs.src);
  vs_flags.add("-k,--k", vs.k, "attack budget (required, >= 0)");
  vs_flags.add("--method", vs.method,
               "enumerate | cutplane (default enumerate)");
  vs_flags.add("--eps", vs.eps, "cutplane relative gap target");
  vs_flags.add("--iter-limit", vs.iter_limit, "cutplane iteration cap");
  vs_flags.add("--eval-cap", vs.eval_cap, "enumeration work cap");
  vs_flags.add("--seed", vs.seed, "seed for scenario generation (default 1)");

  SaaCmd sa;
  CLI::App* sa_cmd = app.add_subcommand(
      "saa", "batched sample-average study with confidence interval");
  Flags sa_flags(sa_cmd);
  add_common(sa_flags, sa.common);
  add_source(sa_flags, sa.src);
  sa_flags.add("-k,--k", sa.k, "attack budget (required, >= 0)");
  sa_flags.add("--batches", sa.batches, "number of batches (>= 2)");
  sa_flags.add("--method", sa.method,
               "enumerate | cutplane (default enumerate)");
  sa_flags.add("--eps", sa.eps, "cutplane relative gap target");
  sa_flags.add("--iter-limit", sa.iter_limit, "cutplane iteration cap");
  sa_flags.add("--eval-cap", sa.eval_cap, "enumeration work cap");
  sa_flags.add("--seed", sa.seed,
               "seed for batch shuffling and scenario generation");

  ValidateCmd va;
  CLI::App* va_cmd = app.add_subcommand(
      "validate", "dry-run checks of network / scenario / model files");
  Flags va_flags(va_cmd);
  add_common(va_flags, va.common, /*with_threads=*/false);
  va_flags.add("--scenarios", va.scenarios, "scenario JSON file to check");
  va_flags.add("--model", va.model, "exported MPS / LP model file to check");
  va_flags.add("--model-format", va.model_format,
               "mps | lp (default: from the file extension)");

  std::set<std::string> known;
  for (const Flags* f :
       {&sc_flags, &so_flags, &ex_flags, &vs_flags, &sa_flags, &va_flags})
    known.insert(f->keys().begin(), f->keys().end());

  try {
    app.parse(argc, argv);
    if (sc_cmd->parsed()) {
      sc_flags.apply(known);
      return run_scenarios(sc);
    }
    if (so_cmd->parsed()) {
      so_flags.apply(known);
      return run_solve(so);
    }
    if (ex_cmd->parsed()) {
      ex_flags.apply(known);
      return run_export(ex);
    }
    if (vs_cmd->parsed()) {
      vs_flags.apply(known);
      return run_vss(vs);
    }
    if (sa_cmd->parsed()) {
      sa_flags.apply(known);
      return run_saa(sa);
    }
    if (va_cmd->parsed()) {
      va_flags.apply(known);
      return run_validate(va);
    }
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
