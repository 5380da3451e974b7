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

#pragma once

#include <cstdint>
#include <vector>

#include "carleman/carleman.hpp"
#include "carleman/schedule.hpp"

namespace carleman {

/// Smallest K >= 1 with (e x)^K / K^K <= eps_star.
int taylor_order(double normGtau, double eps_star);

/// sum_{k <= K} (G tau)^k / k! v.
BlockVector taylor_propagate(const CarlemanMatrix& G, const BlockVector& v, double tau, int K);

/// Applies sum_{k <= K} (G_next^k - (G_next - G_cur)^k) tau^k / k! + I and keeps
/// the first G_cur.levels() levels. G_cur holds the first block rows of
/// G_next, coupling to the level just above included.
BlockVector restricted_propagator(const CarlemanMatrix& G_next, const CarlemanMatrix& G_cur, double tau,
                                  const BlockVector& v, int K);

// One-sparse unitary: U[i, col[i]] = phase[i], col a permutation.
struct OneSparseUnitary {
  std::vector<std::size_t> col;
  std::vector<Complex> phase;
};

struct UnitaryTerm {
  double alpha = 0.0;
  OneSparseUnitary U;
};

struct UnitaryTermSum {
  std::size_t dim = 0;
  std::size_t colors = 0;
  std::vector<UnitaryTerm> terms;
  double a = 0.0;  // sum of alpha
};

/// Greedy edge coloring of the row/column nonzero graph; every piece has at
/// most one nonzero per row and per column.
std::vector<SparseMatrix> one_sparse_pieces(const SparseMatrix& M);

/// Square matrices only.
UnitaryTermSum lcu_decompose(const SparseMatrix& M);
/// Square levels directly, rectangular levels through their [[0,X],[X^H,0]] embedding.
UnitaryTermSum lcu_decompose(const LevelOperator& level);
SparseMatrix reconstruct(const UnitaryTermSum& sum, double drop_tol = 0.0);
std::size_t lcu_term_bound(std::size_t d, std::size_t N);

/// [[0, B], [B^H, 0]] and [[0, B], [-B^H, 0]].
SparseMatrix b_plus_embedding(const SparseMatrix& B);
SparseMatrix b_minus_embedding(const SparseMatrix& B);

struct QueryModelStep {
  int j = 0;
  double L = 0.0;
  int K = 0;
  double M = 0.0;
  double a = 0.0;
  int substeps = 0;
  double queries = 0.0;
};

struct QueryModel {
  std::vector<QueryModelStep> steps;
  double total = 0.0;
  int coloring_factor = 1;
  OracleCounters measured;
};

/// L_j = m_{j+1} (d_A^2 ceil||A|| + d_B^2 ceil||B||), M_j = L_j K_j and
/// total = sum_j substeps_j L_j K_j.
QueryModel query_model(const Schedule& schedule, const QuadraticSystem& sys);

struct StepDiagnostics {
  int j = 0;
  int levels_in = 0;
  int levels_out = 0;
  double unitarity_distance = 0.0;  // | ||top block|| - 1 |
  double drift = 0.0;               // change of unitarity_distance over the step
  double eps_star = 0.0;
  double tail_estimate = 0.0;
  double lcu_reconstruction_error = 0.0;
  OracleCounters queries;
};

struct EvolveOptions {
  SchedulePolicy policy = SchedulePolicy::Bound;
  bool renormalize = false;
  Limits limits = Limits::from_env();
};

struct EvolutionResult {
  DenseVector state;
  bool renormalized = false;
  Schedule schedule;
  QueryModel model;
  std::vector<StepDiagnostics> diagnostics;
  OracleCounters counters;
};

EvolutionResult evolve_carleman(const QuadraticSystem& sys, const DenseVector& u0, double T, double E, double delta,
                                const EvolveOptions& options = {});

struct ExpectationEstimate {
  Complex value;
  double hadamard_probability = 0.0;  // (1 + Re <u|U|u>) / 2
  double analytic_queries = 0.0;
};

ExpectationEstimate expectation_value(const EvolutionResult& result, const UnitaryObservable& U, double eps);

nlohmann::json to_json(const QueryModel& model);
nlohmann::json to_json(const EvolutionResult& result);

}  // namespace carleman
