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

#include "carleman/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace carleman {

int taylor_order(double normGtau, double eps_star) {
  if (!(eps_star > 0 && eps_star < 1)) throw InvalidInput("taylor_order: eps_star must lie in (0, 1)");
  if (normGtau < 0 || !std::isfinite(normGtau)) throw InvalidInput("taylor_order: norm must be finite and >= 0");
  if (normGtau == 0.0) return 1;
  const double log_target = std::log(eps_star);
  const double log_ex = 1.0 + std::log(normGtau);
  for (int K = 1; K < 10000; ++K) {
    if (K * (log_ex - std::log(static_cast<double>(K))) <= log_target) return K;
  }
  throw InstabilityError("taylor_order: no order below 10000 meets the target");
}

namespace {

void check_levels(const CarlemanMatrix& G, const BlockVector& v) {
  if (v.levels() != G.levels() || v.base_dim() != G.system().dim())
    throw InvalidInput("block vector levels do not match the operator");
}

}  // namespace

BlockVector taylor_propagate(const CarlemanMatrix& G, const BlockVector& v, double tau, int K) {
  check_levels(G, v);
  BlockVector out = v;
  DenseVector term(v.data().begin(), v.data().end()), next(v.size());
  auto acc = out.data();
  for (int k = 1; k <= K; ++k) {
    G.apply(term, next);
    const double c = tau / k;
    for (std::size_t i = 0; i < term.size(); ++i) {
      term[i] = c * next[i];
      acc[i] += term[i];
    }
  }
  return out;
}

BlockVector restricted_propagator(const CarlemanMatrix& G_next, const CarlemanMatrix& G_cur, double tau,
                                  const BlockVector& v, int K) {
  check_levels(G_next, v);
  const int keep = G_cur.levels();
  if (keep > G_next.levels() || G_cur.system().dim() != G_next.system().dim())
    throw InvalidInput("restricted_propagator: G_cur must be a leading truncation of G_next");
  const BlockVector full = taylor_propagate(G_next, v, tau, K);

  // (G_next - G_cur) keeps only the block rows above the first keep levels.
  const std::size_t cut = v.prefix_size(keep);
  BlockVector low = v;
  DenseVector term(v.data().begin(), v.data().end()), next(v.size());
  auto acc = low.data();
  for (int k = 1; k <= K; ++k) {
    G_next.apply(term, next);
    std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(cut), Complex{0.0});
    const double c = tau / k;
    for (std::size_t i = 0; i < term.size(); ++i) {
      term[i] = c * next[i];
      acc[i] += term[i];
    }
  }
  BlockVector out(v.base_dim(), keep, cut);
  auto o = out.data();
  auto f = full.data();
  auto l = low.data();
  auto in = v.data();
  for (std::size_t i = 0; i < cut; ++i) o[i] = f[i] - l[i] + in[i];
  return out;
}

QueryModel query_model(const Schedule& schedule, const QuadraticSystem& sys) {
  QueryModel model;
  model.coloring_factor = std::max(1, ceil_log2(sys.dim()));
  const double per_level = static_cast<double>(sys.dA * sys.dA) * std::ceil(sys.normA) +
                           static_cast<double>(sys.dB * sys.dB) * std::ceil(sys.normB);
  for (const auto& st : schedule.steps) {
    QueryModelStep q;
    q.j = st.j;
    q.L = st.m_next * per_level;
    q.K = st.K;
    q.M = q.L * q.K;
    q.a = st.norm_G_tau;
    q.substeps = st.substeps;
    q.queries = q.substeps * q.M;
    model.total += q.queries;
    model.steps.push_back(q);
  }
  return model;
}

namespace {

// Reads A and B through the sparse oracles and rebuilds them from their
// unitary decompositions.
QuadraticSystem lcu_system(const QuadraticSystem& sys, OracleCounters& counters, double& reconstruction_error) {
  const std::size_t N = sys.dim();
  std::vector<Triplet> ta, tb;
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t j = 1; j <= sys.dA; ++j) {
      const auto [col, value] = oracle_A(sys, i, j, counters);
      if (value != Complex{0.0}) ta.push_back({i, col, value});
    }
    for (std::size_t j = 1; j <= sys.dB; ++j) {
      const auto [col, value] = oracle_B(sys, i, j, counters);
      if (value != Complex{0.0}) tb.push_back({i, col, value});
    }
  }
  const SparseMatrix A(N, N, std::move(ta));
  const SparseMatrix B(N, N * N, std::move(tb));
  const double drop = 1e-13 * std::max(1.0, std::max(A.max_abs(), B.max_abs()));
  const SparseMatrix A_lcu = A.empty() ? A : reconstruct(lcu_decompose(A), drop);
  SparseMatrix B_lcu = B;
  if (!B.empty()) {
    const SparseMatrix embedded = reconstruct(lcu_decompose(b_plus_embedding(B)), drop);
    std::vector<Triplet> t;
    for (const auto& e : embedded.triplets())
      if (e.row < N && e.col >= N) t.push_back({e.row, e.col - N, e.value});
    B_lcu = SparseMatrix(N, N * N, std::move(t));
  }
  reconstruction_error = std::max((A_lcu - A).max_abs(), (B_lcu - B).max_abs());
  QuadraticSystem out = sys;
  out.A = A_lcu;
  out.B = B_lcu;
  return out;
}

void scale_levels(BlockVector& v, double factor) {
  double f = 1.0;
  for (int p = 1; p <= v.levels(); ++p) {
    f *= factor;
    for (auto& z : v.block(p)) z *= f;
  }
}

}  // namespace

EvolutionResult evolve_carleman(const QuadraticSystem& sys, const DenseVector& u0, double T, double E, double delta,
                                const EvolveOptions& options) {
  if (u0.size() != sys.dim()) throw InvalidInput("evolve: u0 has wrong dimension");
  if (std::abs(norm(u0) - 1.0) > 1e-10) throw InvalidInput("evolve: u0 must have unit norm");
  EvolutionResult result;
  result.renormalized = options.renormalize;
  result.schedule = build_schedule(sys, T, E, delta, options.policy, options.limits);
  result.model = query_model(result.schedule, sys);
  const Schedule& sched = result.schedule;

  ++result.counters.queries_u;
  BlockVector v = lift_state(u0, sched.steps.front().m_next, options.limits.max_entries);
  double previous_distance = 0.0;
  for (const auto& st : sched.steps) {
    StepDiagnostics diag;
    diag.j = st.j;
    diag.levels_in = st.m_next;
    diag.levels_out = st.m;
    diag.eps_star = st.eps_star;
    OracleCounters step_counters;
    auto step_sys = std::make_shared<const QuadraticSystem>(lcu_system(sys, step_counters, diag.lcu_reconstruction_error));
    const CarlemanMatrix G_next(step_sys, st.m_next, options.limits.max_entries);
    const CarlemanMatrix G_cur(step_sys, st.m, options.limits.max_entries);
    for (int s = 1; s < st.substeps; ++s) v = taylor_propagate(G_next, v, st.tau, st.K);
    v = restricted_propagator(G_next, G_cur, st.tau, v, st.K);

    const double top = norm(v.block(1));
    if (!std::isfinite(top)) throw InstabilityError("evolve: state became non-finite at step " + std::to_string(st.j));
    diag.unitarity_distance = std::abs(top - 1.0);
    diag.drift = diag.unitarity_distance - previous_distance;
    previous_distance = diag.unitarity_distance;
    if (options.renormalize && top > 0) {
      scale_levels(v, 1.0 / top);
      previous_distance = 0.0;
    }
    diag.tail_estimate = summed_tail(st, sys.normA, sys.normB);
    diag.queries = step_counters;
    result.counters += step_counters;
    result.diagnostics.push_back(diag);
  }
  auto top = v.block(1);
  result.state.assign(top.begin(), top.end());
  result.model.measured = result.counters;
  return result;
}

ExpectationEstimate expectation_value(const EvolutionResult& result, const UnitaryObservable& U, double eps) {
  if (!(eps > 0 && eps < 1)) throw InvalidInput("expectation_value: eps must lie in (0, 1)");
  if (U.U.rows() != result.state.size()) throw InvalidInput("expectation_value: observable has wrong dimension");
  ExpectationEstimate out;
  const DenseVector Uu = U.U * result.state;
  out.value = inner(result.state, Uu);
  out.hadamard_probability = (1.0 + out.value.real()) / 2.0;
  out.analytic_queries = std::ceil(1.0 / eps) * result.model.total;
  return out;
}

nlohmann::json to_json(const QueryModel& model) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& q : model.steps)
    steps.push_back({{"j", q.j}, {"L", q.L}, {"K", q.K}, {"M", q.M}, {"a", q.a}, {"substeps", q.substeps},
                     {"queries", q.queries}});
  return {{"total", model.total}, {"coloring_factor", model.coloring_factor},
          {"total_with_coloring_factor", model.total * model.coloring_factor},
          {"measured", to_json(model.measured)}, {"steps", steps}};
}

nlohmann::json to_json(const EvolutionResult& result) {
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : result.diagnostics)
    diags.push_back({{"j", d.j}, {"levels_in", d.levels_in}, {"levels_out", d.levels_out},
                     {"unitarity_distance", d.unitarity_distance}, {"drift", d.drift}, {"eps_star", d.eps_star},
                     {"tail_estimate", d.tail_estimate}, {"lcu_reconstruction_error", d.lcu_reconstruction_error},
                     {"queries", to_json(d.queries)}});
  return {{"state", to_json(std::span<const Complex>(result.state))},
          {"renormalized", result.renormalized},
          {"schedule", to_json(result.schedule)},
          {"query_model", to_json(result.model)},
          {"diagnostics", diags},
          {"counters", to_json(result.counters)}};
}

}  // namespace carleman
