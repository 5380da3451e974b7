// Copyright 2026 The carleman-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "carleman/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "carleman/carleman.hpp"
#include "carleman/dequant.hpp"
#include "carleman/evolve.hpp"
#include "carleman/instances.hpp"
#include "carleman/nogo.hpp"
#include "carleman/reference.hpp"
#include "carleman/schedule.hpp"

namespace carleman::cli {

using nlohmann::json;

namespace {

struct Common {
  std::string out;
  std::string format;
  std::uint64_t seed = 1;
  int workers = 1;
  std::size_t max_entries = 0;
  std::size_t max_steps = 0;
};

struct Output {
  std::string text;
  int code = kExitOk;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json cjson(Complex z) { return json::array({z.real(), z.imag()}); }

json vjson(const DenseVector& v) { return to_json(std::span<const Complex>(v)); }

Limits limits_of(const Common& c) {
  Limits l = Limits::from_env();
  if (c.max_entries) l.max_entries = c.max_entries;
  if (c.max_steps) l.max_steps = c.max_steps;
  return l;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--out", c.out, "output path (stdout when absent)");
  sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--seed", c.seed, "RNG seed");
  sub->add_option("--workers", c.workers, "OpenMP threads")->check(CLI::Range(1, 1024));
  sub->add_option("--max-entries", c.max_entries, "cap on stored block entries")->check(CLI::PositiveNumber);
  sub->add_option("--max-steps", c.max_steps, "cap on time steps")->check(CLI::PositiveNumber);
}

// Options that do not change results are kept out of the echo.
json config_echo(const CLI::App* sub) {
  json echo = json::object();
  for (const CLI::Option* opt : sub->get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "out" || name == "workers") continue;
    const auto& res = opt->results();
    if (res.empty()) {
      if (opt->get_type_size() == 0) echo[name] = false;
      else if (!opt->get_default_str().empty()) echo[name] = opt->get_default_str();
      else echo[name] = nullptr;
    } else if (opt->get_type_size() == 0) {
      echo[name] = true;
    } else if (res.size() == 1) {
      echo[name] = res[0];
    } else {
      echo[name] = res;
    }
  }
  return echo;
}

json record(const std::string& command, const CLI::App* sub) {
  return {{"command", command}, {"version", version_string()}, {"config", config_echo(sub)}};
}

// Appends --key value for config keys not already given on the command line.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InvalidInput("--config needs a path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config file: ") + e.what());
  }
  if (!cfg.is_object()) throw InvalidInput("config file must hold a JSON object");
  auto given = [&](const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
  };
  auto scalar = [](const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw InvalidInput("config values must be scalars or arrays of scalars");
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      args.push_back(flag);
      for (const auto& v : value) args.push_back(scalar(v));
    } else {
      args.push_back(flag);
      args.push_back(scalar(value));
    }
  }
  return args;
}

std::string csv_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  return os.str();
}

Instance require_instance(const std::string& path) {
  if (path.empty()) throw InvalidInput("--instance is required");
  return load_instance(path);
}

// ---- schedule ----

struct ScheduleArgs {
  double c = 0, normA = 0, normB = 0, T = 1, E = 0, eps = 0, delta = 0.5;
  std::string instance, policy = "bound";
};

Output run_schedule(const ScheduleArgs& a, const Common& common, const CLI::App* sub) {
  if ((a.E > 0) == (a.eps > 0)) throw InvalidInput("schedule: give exactly one of --E and --eps");
  double nA = a.normA, nB = a.normB;
  if (!a.instance.empty()) {
    const Instance inst = load_instance(a.instance);
    nA = inst.sys.normA;
    nB = inst.sys.normB;
  } else if (a.c > 0) {
    if (nA == 0 && nB == 0) {
      nA = a.c;
      nB = a.c / surrogate_constant();
    }
  } else if (nA == 0 && nB == 0) {
    throw InvalidInput("schedule: give --c, --instance, or --normA/--normB");
  }
  const double c = a.c > 0 ? a.c : constant_c(nA, nB);
  const double eps = a.eps > 0 ? a.eps : a.E * a.delta * a.delta / (a.T * a.T);
  const Schedule s = build_schedule_eps(c, nA, nB, a.T, eps, a.delta, parse_policy(a.policy), limits_of(common));
  if (common.format != "json") return {schedule_csv(s)};
  json r = record("schedule", sub);
  r["metrics"] = {{"w", s.w}, {"c", s.c}, {"epsilon", s.epsilon}, {"m_1", s.step(1).m},
                  {"m_top", s.steps.front().m_next}};
  r["series"] = to_json(s);
  return {r.dump(2) + "\n"};
}

// ---- evolve ----

struct EvolveArgs {
  std::string instance, policy = "bound";
  double T = 1, E = 1e-3, delta = 0.5, expect_eps = 0.1, ref_tol = 1e-12;
  bool renormalize = false;
};

Output run_evolve(const EvolveArgs& a, const Common& common, const CLI::App* sub) {
  const Instance inst = require_instance(a.instance);
  EvolveOptions opts;
  opts.policy = parse_policy(a.policy);
  opts.renormalize = a.renormalize;
  opts.limits = limits_of(common);
  const EvolutionResult res = evolve_carleman(inst.sys, inst.u0, a.T, a.E, a.delta, opts);
  const DenseVector ref = reference_solve(inst.sys, inst.u0, a.T, a.ref_tol);
  const double err = distance(res.state, ref);
  if (common.format == "csv") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& d : res.diagnostics)
      rows.push_back({std::to_string(d.j), std::to_string(d.levels_in), std::to_string(d.levels_out),
                      num(d.unitarity_distance), num(d.drift), num(d.eps_star), num(d.tail_estimate),
                      num(d.lcu_reconstruction_error), std::to_string(d.queries.queries_A),
                      std::to_string(d.queries.queries_B), std::to_string(d.queries.queries_u)});
    return {csv_table({"j", "levels_in", "levels_out", "unitarity_distance", "drift", "eps_star", "tail_estimate",
                       "lcu_reconstruction_error", "queries_A", "queries_B", "queries_u"},
                      rows)};
  }
  json r = record("evolve", sub);
  r["counters"] = to_json(res.counters);
  json metrics = {{"reference_error", err},
                  {"E", a.E},
                  {"within_E", err <= a.E},
                  {"w", res.schedule.w},
                  {"analytic_queries", res.model.total},
                  {"coloring_factor", res.model.coloring_factor},
                  {"final_state", vjson(res.state)},
                  {"reference_state", vjson(ref)}};
  if (inst.U) {
    const ExpectationEstimate ev = expectation_value(res, *inst.U, a.expect_eps);
    metrics["expectation"] = cjson(ev.value);
    metrics["hadamard_probability"] = ev.hadamard_probability;
    metrics["expectation_queries"] = ev.analytic_queries;
  }
  r["metrics"] = metrics;
  r["series"] = to_json(res);
  return {r.dump(2) + "\n"};
}

// ---- euler ----

struct EulerArgs {
  std::string instance;
  double T = 1, eps = 0.05, h = 0, ref_tol = 1e-12;
  std::size_t nsamples = 0;
  bool exact_input = false;
};

Output run_euler(const EulerArgs& a, const Common& common, const CLI::App* sub) {
  if (common.format == "csv") throw InvalidInput("euler: only json output");
  const Instance inst = require_instance(a.instance);
  EulerOptions opts;
  opts.h = a.h;
  opts.nsamples = a.nsamples;
  opts.limits = limits_of(common);
  EulerResult res;
  if (a.exact_input) {
    res = euler_solve_exact(inst.sys, inst.u0, a.T, a.eps, opts);
  } else {
    SamplingOracle oracle(inst.u0, common.seed);
    res = euler_solve(inst.sys, oracle, a.T, a.eps, opts);
  }
  const DenseVector ref = reference_solve(inst.sys, inst.u0, a.T, a.ref_tol);
  const double err = distance(res.state, ref);
  json r = record("euler", sub);
  r["counters"] = to_json(res.counters);
  r["metrics"] = {{"estimate", vjson(res.state)},
                  {"variance", nullptr},
                  {"nsamples", res.nsamples},
                  {"queries", to_json(res.counters)},
                  {"h", res.h},
                  {"h_used", res.h_used},
                  {"steps", res.steps},
                  {"L", res.L},
                  {"M", res.M},
                  {"bound", res.bound},
                  {"reference_error", err},
                  {"initial_error", distance(res.initial_estimate, inst.u0)},
                  {"within_eps", err <= a.eps}};
  return {r.dump(2) + "\n"};
}

// ---- pimc ----

struct PimcArgs {
  std::string instance;
  double T = 0.3, eps = 0.1, confidence = 2.0 / 3.0, ref_tol = 1e-12;
  int levels = 0, r = 0;
  std::size_t pilot = 1000;
  bool importance = false, enumerate = false;
};

Output run_pimc(const PimcArgs& a, const Common& common, const CLI::App* sub) {
  if (common.format == "csv") throw InvalidInput("pimc: only json output");
  const Instance inst = require_instance(a.instance);
  if (!inst.U) throw InvalidInput("pimc: the instance has no observable U");
  const DenseVector uT = reference_solve(inst.sys, inst.u0, a.T, a.ref_tol);
  const Complex truth = inner(uT, inst.U->U * uT);
  json r = record("pimc", sub);
  if (a.enumerate) {
    const int levels = a.levels > 0 ? a.levels : pimc_levels(inst.sys, a.T, a.eps);
    const int steps = a.r > 0 ? a.r : trotter_steps(a.T, a.eps);
    const Complex enumerated = pimc_exact(inst.sys, inst.u0, *inst.U, a.T, levels, steps);
    const Complex trotter = pimc_exact(inst.sys, inst.u0, *inst.U, a.T, levels, steps, false);
    r["metrics"] = {{"estimate", cjson(enumerated)},
                    {"trotter", cjson(trotter)},
                    {"enumeration_gap", std::abs(enumerated - trotter)},
                    {"reference", cjson(truth)},
                    {"reference_error", std::abs(enumerated - truth)},
                    {"variance", 0.0},
                    {"nsamples", 0},
                    {"levels", levels},
                    {"r", steps}};
    r["counters"] = to_json(OracleCounters{});
    return {r.dump(2) + "\n"};
  }
  PimcOptions opts;
  opts.levels = a.levels;
  opts.r = a.r;
  opts.importance = a.importance;
  opts.pilot = a.pilot;
  opts.limits = limits_of(common);
  const SamplingOracle oracle(inst.u0, common.seed);
  const PimcEstimate est = pimc_estimate(inst.sys, oracle, *inst.U, a.T, a.eps, a.confidence, opts);
  r["counters"] = to_json(est.counters);
  r["metrics"] = {{"estimate", cjson(est.value)},
                  {"variance", est.variance},
                  {"pilot_variance", est.pilot_variance},
                  {"nsamples", est.nsamples},
                  {"pilot", est.pilot},
                  {"queries", to_json(est.counters)},
                  {"levels", est.levels},
                  {"r", est.r},
                  {"factor_count", est.factor_count},
                  {"reference", cjson(truth)},
                  {"reference_error", std::abs(est.value - truth)},
                  {"within_eps", std::abs(est.value - truth) <= a.eps}};
  return {r.dump(2) + "\n"};
}

// ---- nogo ----

struct NogoArgs {
  std::vector<double> coeffs{0.0, 1.0};
  double delta0 = 1.0 / 256, target = 0.5, dwell = 0;
  int max_rounds = 10000;
};

Output run_nogo(const NogoArgs& a, const Common& common, const CLI::App* sub) {
  const NonlinearityKappa kap = NonlinearityKappa::make(a.coeffs);
  const auto [s1, s2] = symmetric_pair(a.delta0);
  const ProtocolResult res = discrimination_protocol(s1, s2, kap, a.target, a.max_rounds, a.dwell);
  if (common.format != "json") {
    std::vector<std::vector<std::string>> rows;
    for (const auto& rd : res.log)
      rows.push_back({std::to_string(rd.round), num(rd.z1), num(rd.z2), num(rd.distance)});
    return {csv_table({"round", "z1", "z2", "bloch_distance"}, rows)};
  }
  json series = json::array();
  for (const auto& rd : res.log)
    series.push_back(
        {{"round", rd.round}, {"z1", rd.z1}, {"z2", rd.z2}, {"bloch_distance", rd.distance}, {"theta", rd.theta}});
  json r = record("nogo", sub);
  r["metrics"] = {{"rounds", res.rounds},         {"reached", res.reached}, {"exhausted", res.exhausted},
                  {"dwell", res.dwell},           {"g", kap.g()},           {"slope", kap.slope()},
                  {"final_distance", res.final_distance}};
  r["series"] = series;
  return {r.dump(2) + "\n"};
}

// ---- gen-instance ----

struct GenArgs {
  std::string kind;
  int n = 1;
  double g = 0.15;
};

Output run_gen(const GenArgs& a, const Common& common) {
  if (common.format == "csv") throw InvalidInput("gen-instance: only json output");
  const Instance inst = gen_instance(a.kind, a.n, common.seed, a.g);
  return {to_json(inst).dump(1) + "\n"};
}

// ---- verify-bounds ----

struct VerifyArgs {
  std::string grid = "small";
};

Output run_verify(const VerifyArgs& a, const Common& common, const CLI::App* sub) {
  std::vector<int> ms, ks;
  std::vector<double> ts, norms;
  if (a.grid == "small") {
    ms = {1, 2, 3};
    ks = {1, 2, 3};
    ts = {0.05, 0.3};
    norms = {0.5, 1.0};
  } else {
    ms = {1, 2, 3, 4, 5};
    ks = {1, 2, 3, 4, 5};
    ts = {0.01, 0.05, 0.1, 0.3};
    norms = {0.5, 1.0, 2.0};
  }
  std::vector<std::vector<std::string>> rows;
  json series = json::array();
  bool all_ok = true;
  std::uint64_t stream = 10;
  for (double na : norms)
    for (double nb : norms) {
      const SparseMatrix A0 = random_matrix(2, 2, common.seed, stream++);
      const SparseMatrix B0 = random_matrix(2, 4, common.seed, stream++);
      const QuadraticSystem sys =
          QuadraticSystem::make(A0.scaled(na / spectral_norm(A0)), B0.scaled(nb / spectral_norm(B0)));
      for (int m : ms) {
        const auto measured_all = carleman_block_norms(sys, m, ks.back(), ts);
        for (int k : ks)
          for (std::size_t ti = 0; ti < ts.size(); ++ti) {
            const double t = ts[ti];
            const double measured = measured_all[ti][k];
            const double sur = surrogate_expm_entry(m, k, t, sys.normA, sys.normB);
            const double bound = truncation_bound(m, k, t, sys.normA, sys.normB);
            const bool ok = measured <= sur * (1 + 1e-9) + 1e-15 && sur <= bound * (1 + 1e-12);
            all_ok = all_ok && ok;
            rows.push_back({std::to_string(m), std::to_string(k), num(t), num(na), num(nb), num(measured), num(sur),
                            num(bound), ok ? "1" : "0"});
            series.push_back({{"m", m}, {"k", k}, {"t", t}, {"normA", na}, {"normB", nb}, {"measured", measured},
                              {"surrogate", sur}, {"bound", bound}, {"ok", ok}});
          }
      }
    }
  Output out;
  out.code = all_ok ? kExitOk : kExitFailure;
  if (common.format == "json") {
    json r = record("verify-bounds", sub);
    r["metrics"] = {{"cases", rows.size()}, {"all_ok", all_ok}};
    r["series"] = series;
    out.text = r.dump(2) + "\n";
  } else {
    out.text = csv_table({"m", "k", "t", "normA", "normB", "measured", "surrogate", "bound", "ok"}, rows);
  }
  return out;
}

void put_runtime(std::string& text, double wall, int workers_used) {
  if (text.empty() || text[0] != '{') return;
  json r = json::parse(text);
  if (!r.contains("command")) return;
  r["runtime"] = {{"wall_time_s", wall}, {"workers", workers_used}};
  text = r.dump(2) + "\n";
}

}  // namespace

std::string version_string() { return std::string("carleman-sim ") + CARLEMAN_SIM_VERSION; }

int run(const std::vector<std::string>& raw) {
  CLI::App app{"Carleman linearization and dequantization simulator", "carleman-sim"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Common common;
  ScheduleArgs sa;
  EvolveArgs ea;
  EulerArgs ua;
  PimcArgs pa;
  NogoArgs na;
  GenArgs ga;
  VerifyArgs va;

  auto* s = app.add_subcommand("schedule", "print the step schedule");
  s->add_option("--c", sa.c, "constant c")->check(CLI::PositiveNumber);
  s->add_option("--normA", sa.normA, "||A||")->check(CLI::NonNegativeNumber);
  s->add_option("--normB", sa.normB, "||B||")->check(CLI::NonNegativeNumber);
  s->add_option("--instance", sa.instance, "instance file");
  s->add_option("--T", sa.T, "final time")->check(CLI::PositiveNumber);
  s->add_option("--E", sa.E, "target error")->check(CLI::PositiveNumber);
  s->add_option("--eps", sa.eps, "per-step truncation epsilon")->check(CLI::Range(1e-300, 1.0));
  s->add_option("--delta", sa.delta, "delta")->check(CLI::PositiveNumber);
  s->add_option("--policy", sa.policy, "bound or harmonic")->check(CLI::IsMember({"bound", "harmonic"}));
  add_common(s, common);

  auto* e = app.add_subcommand("evolve", "truncated Carleman evolution");
  e->add_option("--instance", ea.instance, "instance file")->required();
  e->add_option("--T", ea.T, "final time")->check(CLI::PositiveNumber);
  e->add_option("--E", ea.E, "target error")->check(CLI::Range(1e-300, 1.0));
  e->add_option("--delta", ea.delta, "delta")->check(CLI::PositiveNumber);
  e->add_option("--policy", ea.policy, "bound or harmonic")->check(CLI::IsMember({"bound", "harmonic"}));
  e->add_flag("--renormalize", ea.renormalize, "renormalize after every step");
  e->add_option("--expect-eps", ea.expect_eps, "precision for the expectation cost")
      ->check(CLI::Range(1e-300, 1.0));
  e->add_option("--ref-tol", ea.ref_tol, "reference solver tolerance")->check(CLI::PositiveNumber);
  add_common(e, common);

  auto* u = app.add_subcommand("euler", "sampling-oracle Euler solver");
  u->add_option("--instance", ua.instance, "instance file")->required();
  u->add_option("--T", ua.T, "final time")->check(CLI::PositiveNumber);
  u->add_option("--eps", ua.eps, "target error")->check(CLI::Range(1e-300, 1.0));
  u->add_option("--step-size", ua.h, "step size (0 selects it)")->check(CLI::NonNegativeNumber);
  u->add_option("--nsamples", ua.nsamples, "input samples (0 selects them)");
  u->add_flag("--exact-input", ua.exact_input, "start from the exact u0");
  u->add_option("--ref-tol", ua.ref_tol, "reference solver tolerance")->check(CLI::PositiveNumber);
  add_common(u, common);

  auto* p = app.add_subcommand("pimc", "path-integral Monte Carlo estimator");
  p->add_option("--instance", pa.instance, "instance file")->required();
  p->add_option("--T", pa.T, "final time")->check(CLI::PositiveNumber);
  p->add_option("--eps", pa.eps, "target error")->check(CLI::Range(1e-300, 1.0));
  p->add_option("--confidence", pa.confidence, "success probability")->check(CLI::Range(1e-9, 1.0 - 1e-9));
  p->add_option("--levels", pa.levels, "Carleman levels (0 selects them)")->check(CLI::Range(0, 64));
  p->add_option("--r", pa.r, "Trotter steps (0 selects them)")->check(CLI::Range(0, 1 << 20));
  p->add_option("--pilot", pa.pilot, "pilot samples")->check(CLI::Range(2, 1 << 24));
  p->add_flag("--importance", pa.importance, "branch with probability proportional to |entry|");
  p->add_flag("--enumerate", pa.enumerate, "sum every path");
  p->add_option("--ref-tol", pa.ref_tol, "reference solver tolerance")->check(CLI::PositiveNumber);
  add_common(p, common);

  auto* g = app.add_subcommand("nogo", "state discrimination protocol");
  g->add_option("--coeffs", na.coeffs, "kappa coefficients a_1, a_2, ...")->delimiter(',');
  g->add_option("--delta0", na.delta0, "initial Bloch distance")->check(CLI::Range(1e-300, 2.0));
  g->add_option("--target", na.target, "target Bloch distance")->check(CLI::Range(1e-300, 2.0));
  g->add_option("--dwell", na.dwell, "dwell time (0 selects 1/(2g))")->check(CLI::NonNegativeNumber);
  g->add_option("--max-rounds", na.max_rounds, "round cap")->check(CLI::Range(1, 1 << 24));
  add_common(g, common);

  auto* gi = app.add_subcommand("gen-instance", "write a generated instance");
  gi->add_option("--kind", ga.kind, "instance kind")->required();
  gi->add_option("--n", ga.n, "log2 N")->check(CLI::Range(0, 12));
  gi->add_option("--g", ga.g, "||B||")->check(CLI::NonNegativeNumber);
  add_common(gi, common);

  auto* vb = app.add_subcommand("verify-bounds", "check measured block norms against the bounds");
  vb->add_option("--grid", va.grid, "small or full")->check(CLI::IsMember({"small", "full"}));
  add_common(vb, common);

  try {
    std::vector<std::string> args = merge_config(raw);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::Success& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitValidation;
  } catch (const InvalidInput& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitValidation;
  }

  try {
    set_workers(common.workers);
    if (common.max_entries) setenv("CARLEMAN_SIM_MAX_ENTRIES", std::to_string(common.max_entries).c_str(), 1);
    const auto start = std::chrono::steady_clock::now();
    Output out;
    if (s->parsed()) out = run_schedule(sa, common, s);
    else if (e->parsed()) out = run_evolve(ea, common, e);
    else if (u->parsed()) out = run_euler(ua, common, u);
    else if (p->parsed()) out = run_pimc(pa, common, p);
    else if (g->parsed()) out = run_nogo(na, common, g);
    else if (gi->parsed()) out = run_gen(ga, common);
    else out = run_verify(va, common, vb);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    put_runtime(out.text, wall, common.workers);
    if (common.out.empty()) {
      std::cout << out.text;
    } else {
      std::ofstream f(common.out, std::ios::binary);
      if (!f) throw InvalidInput("cannot write " + common.out);
      f << out.text;
    }
    return out.code;
  } catch (const InvalidInput& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const CapacityError& ex) {
    std::cerr << "capacity error: " << ex.what() << '\n';
    return kExitCapacity;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace carleman::cli
