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

#include <memory>
#include <numeric>

#include <gtest/gtest.h>

#include "carleman/reference.hpp"
#include "test_util.hpp"

using namespace carleman;
using namespace carleman::testing;

namespace {

std::shared_ptr<const QuadraticSystem> shared(QuadraticSystem s) {
  return std::make_shared<const QuadraticSystem>(std::move(s));
}

DenseVector flat(const BlockVector& v) { return {v.data().begin(), v.data().end()}; }

}  // namespace

TEST(taylor_order, is_minimal) {
  for (double x : {0.01, 0.3, 1.0, 2.5})
    for (double eps : {0.5, 1e-3, 1e-9}) {
      const int K = taylor_order(x, eps);
      auto ok = [&](int k) { return std::pow(std::exp(1.0) * x / k, k) <= eps; };
      EXPECT_TRUE(ok(K)) << x << " " << eps;
      if (K > 1) {
        EXPECT_FALSE(ok(K - 1)) << x << " " << eps;
      }
    }
  EXPECT_EQ(taylor_order(0.0, 0.1), 1);
  EXPECT_THROW(taylor_order(1.0, 0.0), InvalidInput);
  EXPECT_THROW(taylor_order(-1.0, 0.1), InvalidInput);
}

TEST(taylor_propagate, matches_dense_exponential) {
  const auto sys = shared(random_system(2, 3, 1.0, 0.4));
  const CarlemanMatrix G(sys, 3);
  const DenseVector u = random_unit_vector(2, 1, 1, false);
  const BlockVector v = lift_state(u, 3);
  const BlockVector out = taylor_propagate(G, v, 0.05, 20);
  const Eigen::VectorXcd ref = (dense_carleman(*sys, 1, 3) * 0.05).exp() * to_eigen(flat(v));
  EXPECT_LT((to_eigen(flat(out)) - ref).norm(), 1e-13);
}

TEST(restricted_propagator, equals_literal_dense_formula) {
  const auto sys = shared(random_system(2, 5, 0.9, 0.3));
  const int hi = 4, lo = 2, K = 6;
  const double tau = 0.08;
  const CarlemanMatrix Gn(sys, hi), Gc(sys, lo);
  const BlockVector v = lift_state(random_unit_vector(2, 2, 2, false), hi);
  const BlockVector out = restricted_propagator(Gn, Gc, tau, v, K);
  ASSERT_EQ(out.levels(), lo);

  const Eigen::MatrixXcd G = dense_carleman(*sys, 1, hi);
  Eigen::MatrixXcd D = G;
  const Eigen::Index cut = 2 + 4;
  D.topRows(cut).setZero();
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(G.rows(), G.cols());
  Eigen::MatrixXcd Gk = P, Dk = P;
  double fact = 1.0;
  for (int k = 1; k <= K; ++k) {
    Gk = Gk * G;
    Dk = Dk * D;
    fact *= k;
    P += (Gk - Dk) * std::pow(tau, k) / fact;
  }
  const Eigen::VectorXcd ref = (P * to_eigen(flat(v))).head(cut);
  EXPECT_LT((to_eigen(flat(out)) - ref).norm(), 1e-14);
  // Top rows coincide with the untruncated Taylor step.
  const BlockVector full = taylor_propagate(Gn, v, tau, K);
  EXPECT_LT(max_diff(flat(out), flat(full.truncated(lo))), 1e-15);
  EXPECT_THROW(restricted_propagator(Gc, Gn, tau, lift_state(random_unit_vector(2, 2, 2, false), lo), K),
               InvalidInput);
}

TEST(one_sparse_pieces, partition_the_matrix) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SparseMatrix M = random_matrix(5, 7, s, 1, 0.5);
    if (M.empty()) continue;
    const auto pieces = one_sparse_pieces(M);
    SparseMatrix sum = SparseMatrix::zero(5, 7);
    for (const auto& p : pieces) {
      EXPECT_LE(p.sparsity(), 1u);
      EXPECT_LE(p.adjoint().sparsity(), 1u);
      sum = sum + p;
    }
    EXPECT_EQ((sum - M).nnz(), 0u);
    const std::size_t d = std::max(M.sparsity(), M.adjoint().sparsity());
    EXPECT_LE(pieces.size(), 2 * d - 1);
  }
}

TEST(lcu, terms_are_one_sparse_unitaries_and_reconstruct) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const std::size_t N = 2 + s % 4;
    const SparseMatrix M = random_matrix(N, N, s, 3, 0.6);
    if (M.empty()) continue;
    const UnitaryTermSum sum = lcu_decompose(M);
    double a = 0.0;
    for (const auto& t : sum.terms) {
      std::vector<std::size_t> cols = t.U.col;
      std::sort(cols.begin(), cols.end());
      for (std::size_t i = 0; i < N; ++i) EXPECT_EQ(cols[i], i);
      for (const auto& ph : t.U.phase) EXPECT_NEAR(std::abs(ph), 1.0, 1e-14);
      EXPECT_GT(t.alpha, 0.0);
      a += t.alpha;
    }
    EXPECT_NEAR(a, sum.a, 1e-12);
    EXPECT_LT((reconstruct(sum).to_dense() - M.to_dense()).norm(), 1e-13);
    EXPECT_LE(sum.terms.size(), lcu_term_bound(std::max(M.sparsity(), M.adjoint().sparsity()), N));
  }
}

TEST(lcu, level_operators_and_embeddings) {
  const auto sys = shared(random_system(2, 6, 1.0, 0.5, 0.7));
  const LevelOperator A2(sys, 2, LevelKind::A), B2(sys, 2, LevelKind::B);
  EXPECT_LT((reconstruct(lcu_decompose(A2)).to_dense() - A2.to_sparse().to_dense()).norm(), 1e-12);
  const SparseMatrix Bp = b_plus_embedding(B2.to_sparse());
  EXPECT_LT((Bp.to_dense() - Bp.to_dense().adjoint()).norm(), 1e-15);
  EXPECT_LT((reconstruct(lcu_decompose(B2)).to_dense() - Bp.to_dense()).norm(), 1e-12);
  const SparseMatrix Bm = b_minus_embedding(sys->B);
  EXPECT_LT((Bm.to_dense() + Bm.to_dense().adjoint()).norm(), 1e-15);
  EXPECT_THROW(lcu_decompose(sys->B), InvalidInput);
}

TEST(query_model, formula) {
  const QuadraticSystem sys = random_system(4, 2, 1.5, 0.2, 0.5);
  const Schedule s = build_schedule(sys, 0.3, 1e-2, 0.5, SchedulePolicy::Harmonic);
  const QueryModel q = query_model(s, sys);
  double total = 0.0;
  for (const auto& st : s.steps) {
    const double L = st.m_next * (double(sys.dA * sys.dA) * std::ceil(sys.normA) +
                                  double(sys.dB * sys.dB) * std::ceil(sys.normB));
    total += st.substeps * L * st.K;
  }
  EXPECT_DOUBLE_EQ(q.total, total);
  EXPECT_EQ(q.coloring_factor, 2);
  EXPECT_EQ(q.steps.size(), s.steps.size());
}

TEST(evolve, linear_instance_matches_exact_solution) {
  const Instance inst = gen_instance("linear-hermitian", 1, 5);
  const double T = 0.3, E = 1e-2;
  const EvolutionResult r = evolve_carleman(inst.sys, inst.u0, T, E, 0.5, {SchedulePolicy::Harmonic});
  const Eigen::VectorXcd exact = (inst.sys.A.to_dense() * T).exp() * to_eigen(inst.u0);
  EXPECT_LT((to_eigen(r.state) - exact).norm(), E);
}

TEST(evolve, nonlinear_matches_reference_and_counts_queries) {
  const Instance inst = gen_instance("gp-toy", 1, 2);
  const double T = 0.2, E = 1e-3;
  const EvolutionResult r = evolve_carleman(inst.sys, inst.u0, T, E, 0.5, {SchedulePolicy::Harmonic});
  const DenseVector ref = reference_solve(inst.sys, inst.u0, T, 1e-12);
  EXPECT_LT(distance(r.state, ref), E);
  ASSERT_EQ(static_cast<int>(r.diagnostics.size()), r.schedule.w);
  OracleCounters sum;
  for (const auto& d : r.diagnostics) {
    EXPECT_EQ(d.queries.queries_A, inst.sys.A.nnz());
    EXPECT_EQ(d.queries.queries_B, inst.sys.B.nnz());
    EXPECT_LE(std::abs(d.drift), 4 * d.eps_star);
    EXPECT_LT(d.lcu_reconstruction_error, 1e-12);
    sum += d.queries;
  }
  sum.queries_u += 1;
  EXPECT_EQ(sum, r.counters);
  EXPECT_EQ(r.model.measured, r.counters);
}

TEST(evolve, renormalization_and_validation) {
  const Instance inst = gen_instance("gp-toy", 1, 2);
  EvolveOptions opts{SchedulePolicy::Harmonic, true};
  const EvolutionResult r = evolve_carleman(inst.sys, inst.u0, 0.1, 1e-2, 0.5, opts);
  EXPECT_TRUE(r.renormalized);
  EXPECT_NEAR(norm(r.state), 1.0, 1e-14);
  EXPECT_THROW(evolve_carleman(inst.sys, DenseVector{1.0, 1.0}, 0.1, 1e-2, 0.5), InvalidInput);
  Limits tiny;
  tiny.max_entries = 8;
  EXPECT_THROW(evolve_carleman(inst.sys, inst.u0, 0.1, 1e-2, 0.5, {SchedulePolicy::Harmonic, false, tiny}),
               CapacityError);
}

TEST(expectation_value, matches_direct_computation) {
  const Instance inst = gen_instance("gp-toy", 1, 2);
  const EvolutionResult r = evolve_carleman(inst.sys, inst.u0, 0.1, 1e-3, 0.5, {SchedulePolicy::Harmonic});
  const ExpectationEstimate e = expectation_value(r, *inst.U, 0.1);
  const DenseVector Uu = inst.U->U * r.state;
  EXPECT_EQ(e.value, inner(r.state, Uu));
  EXPECT_DOUBLE_EQ(e.hadamard_probability, (1 + e.value.real()) / 2);
  EXPECT_DOUBLE_EQ(e.analytic_queries, 10 * r.model.total);
  EXPECT_THROW(expectation_value(r, *inst.U, 0.0), InvalidInput);
}
