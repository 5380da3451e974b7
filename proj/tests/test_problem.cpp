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

#include "carleman/problem.hpp"

#include <cstdio>
#include <filesystem>

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include "carleman/reference.hpp"
#include "test_util.hpp"

using namespace carleman;
using namespace carleman::testing;

namespace {

PolynomialSystem random_polynomial(std::size_t D, int k, std::uint64_t seed, double density = 0.6) {
  PolynomialSystem P;
  P.D = D;
  std::size_t cols = 1;
  for (int j = 1; j <= k; ++j) {
    cols *= D;
    SparseMatrix F = random_matrix(D, cols, seed, 100 + static_cast<std::uint64_t>(j), density);
    if (F.empty()) F = SparseMatrix(D, cols, {{0, 0, 1.0}});
    P.F.push_back(F.scaled(0.5 / spectral_norm(F)));
  }
  return P;
}

// d/dt u^{(x)p} = sum_q u^{(x)q} (x) f(u) (x) u^{(x)(p-q-1)}.
DenseVector lifted_derivative(const PolynomialSystem& P, const DenseVector& u) {
  const DenseVector f = P.rhs(u);
  DenseVector out;
  for (int p = 1; p < P.order(); ++p) {
    DenseVector level(static_cast<std::size_t>(std::pow(P.D, p)), 0.0);
    for (int q = 0; q < p; ++q) {
      DenseVector term{1.0};
      for (int i = 0; i < p; ++i) term = kron(term, i == q ? f : u);
      for (std::size_t i = 0; i < level.size(); ++i) level[i] += term[i];
    }
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

}  // namespace

TEST(quadratic_system, validates_shapes) {
  EXPECT_THROW(QuadraticSystem::make(SparseMatrix::identity(2), SparseMatrix::zero(2, 3)), InvalidInput);
  EXPECT_THROW(QuadraticSystem::make(SparseMatrix::zero(2, 3), SparseMatrix::zero(2, 4)), InvalidInput);
  const QuadraticSystem s = random_system(3, 1, 0.7, 0.3);
  EXPECT_NEAR(s.normA, 0.7, 1e-10);
  EXPECT_NEAR(s.normB, 0.3, 1e-10);
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.dA, 3u);
  EXPECT_EQ(s.dB, 9u);
}

TEST(quadratic_system, rhs_matches_dense) {
  const QuadraticSystem s = random_system(3, 2);
  const DenseVector u = random_unit_vector(3, 2, 1, false);
  const Eigen::VectorXcd uu = Eigen::kroneckerProduct(to_eigen(u), to_eigen(u)).eval();
  const Eigen::VectorXcd ref = s.A.to_dense() * to_eigen(u) + s.B.to_dense() * uu;
  EXPECT_LT((to_eigen(s.rhs(u)) - ref).norm(), 1e-14);
}

TEST(oracles, padding_and_counting) {
  const QuadraticSystem s = QuadraticSystem::make(SparseMatrix(2, 2, {{0, 0, 2.0}, {0, 1, 3.0}, {1, 1, 4.0}}),
                                                  SparseMatrix(2, 4, {{1, 3, 5.0}}));
  OracleCounters c;
  EXPECT_EQ(oracle_A(s, 0, 2, c), std::make_pair(std::size_t{1}, Complex(3.0)));
  EXPECT_EQ(oracle_A(s, 1, 1, c), std::make_pair(std::size_t{1}, Complex(4.0)));
  // Row 1 of A has one nonzero: padding returns the self column, uncounted.
  EXPECT_EQ(oracle_A(s, 1, 2, c), std::make_pair(std::size_t{1}, Complex(0.0)));
  EXPECT_EQ(oracle_B(s, 0, 1, c), std::make_pair(std::size_t{0}, Complex(0.0)));
  EXPECT_EQ(oracle_B(s, 1, 1, c), std::make_pair(std::size_t{3}, Complex(5.0)));
  EXPECT_EQ(c.queries_A, 2u);
  EXPECT_EQ(c.queries_B, 1u);
  EXPECT_THROW(oracle_A(s, 0, 0, c), InvalidInput);
  EXPECT_THROW(oracle_A(s, 2, 1, c), InvalidInput);
}

TEST(sampling_oracle, chi_square_goodness_of_fit) {
  const DenseVector u = random_unit_vector(8, 5, 1, false);
  SamplingOracle o(u, 77);
  OracleCounters c;
  const std::size_t n = 100000;
  std::vector<double> hits(8, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const auto d = o.sample(c);
    hits[d.index] += 1;
    EXPECT_GE(d.phase, 0.0);
    EXPECT_LT(d.phase, 2 * std::numbers::pi);
    EXPECT_LT(std::abs(std::polar(1.0, d.phase) - u[d.index] / std::abs(u[d.index])), 1e-14);
  }
  double stat = 0.0;
  for (std::size_t j = 0; j < 8; ++j) {
    const double e = n * std::norm(u[j]);
    stat += (hits[j] - e) * (hits[j] - e) / e;
  }
  const boost::math::chi_squared dist(7);
  EXPECT_LT(stat, boost::math::quantile(dist, 1 - 0.001));
  EXPECT_EQ(c.queries_u, n);
  EXPECT_EQ(o.draws(), n);
}

TEST(sampling_oracle, deterministic_and_pure_draws) {
  const DenseVector u = random_unit_vector(4, 1, 1, false);
  SamplingOracle a(u, 3), b(u, 3);
  OracleCounters c;
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.sample(c).index, b.sample(c).index);
  EXPECT_EQ(a.draw_at(4, 9).index, b.draw_at(4, 9).index);
  EXPECT_EQ(a.draw_from_unit(0.0).index, 0u);
  EXPECT_THROW(SamplingOracle(DenseVector{1.0, 1.0}, 1), InvalidInput);
}

TEST(sampling_oracle, initial_state_estimate_converges) {
  const DenseVector u = random_unit_vector(4, 8, 1, false);
  SamplingOracle o(u, 5);
  OracleCounters c;
  const DenseVector est = estimate_initial_state(o, 200000, c);
  EXPECT_LT(distance(est, u), 0.01);
  EXPECT_EQ(c.queries_u, 200000u);
}

TEST(unitary_observable, accepts_unitary_rejects_other) {
  EXPECT_NO_THROW(UnitaryObservable::make(SparseMatrix(2, 2, {{0, 1, 1.0}, {1, 0, Complex(0, 1)}})));
  EXPECT_THROW(UnitaryObservable::make(SparseMatrix(2, 2, {{0, 0, 2.0}, {1, 1, 1.0}})), InvalidInput);
}

TEST(reduction, lifted_state_satisfies_quadratic_system) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t D = 1 + seed % 3;
    const int k = 3 + static_cast<int>(seed % 2);
    const PolynomialSystem P = random_polynomial(D, k, seed);
    const QuadraticSystem Q = reduce_to_quadratic(P);
    const DenseVector u = random_unit_vector(D, seed, 2, false);
    const DenseVector lifted = lift_polynomial_state(u, k);
    EXPECT_LT(max_diff(Q.rhs(lifted), lifted_derivative(P, u)), 1e-13) << "seed " << seed;
  }
}

TEST(reduction, quadratic_input_is_unchanged) {
  const PolynomialSystem P = random_polynomial(2, 2, 3);
  const QuadraticSystem Q = reduce_to_quadratic(P);
  EXPECT_EQ((Q.A - P.F[0]).nnz(), 0u);
  EXPECT_EQ((Q.B - P.F[1]).nnz(), 0u);
}

TEST(reduction, norm_and_sparsity_bounds_hold) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t D = 1 + seed % 3;
    const int k = 2 + static_cast<int>(seed % 3);
    const PolynomialSystem P = random_polynomial(D, k, 1000 + seed, 0.5);
    const QuadraticSystem Q = reduce_to_quadratic(P);
    const ReductionBounds nb = reduction_norm_bounds(P);
    const SparsityBounds sb = sparsity_bounds(P);
    EXPECT_LE(Q.normA, nb.normA_bound * (1 + 1e-9)) << "seed " << seed;
    EXPECT_LE(Q.normB, nb.normB_bound * (1 + 1e-9)) << "seed " << seed;
    EXPECT_LE(Q.dA, sb.dA) << "seed " << seed;
    EXPECT_LE(Q.dB, sb.dB) << "seed " << seed;
  }
}

TEST(reduction, rejects_invalid) {
  PolynomialSystem P;
  P.D = 2;
  P.F = {SparseMatrix::identity(2)};
  EXPECT_THROW(reduce_to_quadratic(P), InvalidInput);
  P.F.push_back(SparseMatrix::zero(2, 3));
  EXPECT_THROW(reduce_to_quadratic(P), InvalidInput);
}

TEST(reduction, capacity_cap) {
  const PolynomialSystem P = random_polynomial(3, 4, 1);
  // levels 3 + 9 + 27 = 39: each level fits under 30, the total does not
  EXPECT_THROW(reduce_to_quadratic(P, 30), CapacityError);
  EXPECT_THROW(reduce_to_quadratic(P, 20), CapacityError);
  EXPECT_NO_THROW(reduce_to_quadratic(P, 39));
}

TEST(instance, json_round_trip_and_validation) {
  Instance inst = gen_instance("gp-toy", 2, 4);
  const Instance back = instance_from_json(to_json(inst));
  EXPECT_EQ(back.kind, "gp-toy");
  EXPECT_EQ(back.u0, inst.u0);
  EXPECT_EQ((back.sys.B - inst.sys.B).nnz(), 0u);
  ASSERT_TRUE(back.U.has_value());
  nlohmann::json j = to_json(inst);
  j["extra"] = 1;
  EXPECT_THROW(instance_from_json(j), InvalidInput);
  j = to_json(inst);
  j["u0"][0][0] = 5.0;
  EXPECT_THROW(instance_from_json(j), InvalidInput);
  j = to_json(inst);
  j["n"] = 7;
  EXPECT_THROW(instance_from_json(j), InvalidInput);
}

TEST(instance, file_round_trip) {
  const auto path = std::filesystem::temp_directory_path() / "carleman_instance_test.json";
  const Instance inst = gen_instance("linear-hermitian", 2, 9);
  save_instance(inst, path.string());
  const Instance back = load_instance(path.string());
  EXPECT_EQ(back.u0, inst.u0);
  std::filesystem::remove(path);
  EXPECT_THROW(load_instance("/nonexistent/instance.json"), InvalidInput);
}

TEST(reference, matches_closed_form_linear_solution) {
  const Instance inst = gen_instance("linear-hermitian", 2, 3);
  const DenseVector out = reference_solve(inst.sys, inst.u0, 1.3, 1e-12);
  const Eigen::VectorXcd exact = (inst.sys.A.to_dense() * 1.3).exp() * to_eigen(inst.u0);
  EXPECT_LT((to_eigen(out) - exact).norm(), 1e-10);
}

TEST(ceil_log2, values) {
  EXPECT_EQ(ceil_log2(1), 0);
  EXPECT_EQ(ceil_log2(2), 1);
  EXPECT_EQ(ceil_log2(3), 2);
  EXPECT_EQ(ceil_log2(8), 3);
  EXPECT_EQ(ceil_log2(9), 4);
}
