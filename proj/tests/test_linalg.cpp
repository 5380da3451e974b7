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

#include "carleman/linalg.hpp"

#include <cstdlib>

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace carleman;
using namespace carleman::testing;

TEST(sparse_matrix, sums_duplicates_and_drops_zeros) {
  SparseMatrix m(2, 3, {{0, 1, 1.0}, {0, 1, 2.0}, {1, 2, 1.0}, {1, 2, -1.0}});
  EXPECT_EQ(m.nnz(), 1u);
  EXPECT_EQ(m.row(0)[0].value, Complex(3.0));
  EXPECT_EQ(m.sparsity(), 1u);
}

TEST(sparse_matrix, rejects_out_of_range) {
  EXPECT_THROW(SparseMatrix(2, 2, {{2, 0, 1.0}}), InvalidInput);
  EXPECT_THROW(SparseMatrix(0, 2, {}), InvalidInput);
}

TEST(sparse_matrix, arithmetic_matches_dense) {
  const SparseMatrix a = random_matrix(5, 4, 7, 1, 0.5);
  const SparseMatrix b = random_matrix(5, 4, 7, 2, 0.5);
  const SparseMatrix c = random_matrix(4, 3, 7, 3, 0.5);
  EXPECT_LT(((a + b).to_dense() - (a.to_dense() + b.to_dense())).norm(), 1e-14);
  EXPECT_LT(((a - b).to_dense() - (a.to_dense() - b.to_dense())).norm(), 1e-14);
  EXPECT_LT(((a * c).to_dense() - a.to_dense() * c.to_dense()).norm(), 1e-14);
  EXPECT_LT((a.adjoint().to_dense() - a.to_dense().adjoint()).norm(), 1e-15);
  EXPECT_LT((a.scaled({0, 2}).to_dense() - Complex(0, 2) * a.to_dense()).norm(), 1e-14);
  const DenseVector x = random_unit_vector(4, 7, 4, false);
  EXPECT_LT((to_eigen(a * x) - a.to_dense() * to_eigen(x)).norm(), 1e-14);
}

TEST(sparse_matrix, from_dense_round_trip) {
  const SparseMatrix a = random_matrix(3, 6, 9, 1, 0.4);
  EXPECT_LT((SparseMatrix::from_dense(a.to_dense()).to_dense() - a.to_dense()).norm(), 0.0 + 1e-300);
}

TEST(sparse_matrix, norm_bounds) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const SparseMatrix a = random_matrix(6, 9, s, 1, 0.3 + 0.05 * s);
    if (a.empty()) continue;
    const double exact = Eigen::JacobiSVD<Eigen::MatrixXcd>(a.to_dense()).singularValues()(0);
    EXPECT_NEAR(spectral_norm(a), exact, 1e-10 * exact);
    EXPECT_GE(a.norm_upper_bound(), exact * (1 - 1e-12));
    EXPECT_LE(a.max_abs(), exact * (1 + 1e-12));
  }
}

TEST(sparse_matrix, power_iteration_norm_large) {
  // Above the dense SVD size the norm comes from power iteration.
  const std::size_t n = 600;
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0 + static_cast<double>(i % 7)});
  t.push_back({0, n - 1, 0.5});
  const SparseMatrix a(n, n, t);
  const double exact = Eigen::JacobiSVD<Eigen::MatrixXcd>(a.to_dense()).singularValues()(0);
  EXPECT_NEAR(spectral_norm(a), exact, 1e-6 * exact);
}

TEST(kron, matches_eigen_kronecker_product) {
  const SparseMatrix a = random_matrix(2, 3, 1, 1, 0.7);
  const SparseMatrix b = random_matrix(3, 2, 1, 2, 0.7);
  const Eigen::MatrixXcd ref = Eigen::kroneckerProduct(a.to_dense(), b.to_dense()).eval();
  EXPECT_LT((kron(a, b).to_dense() - ref).norm(), 1e-14);
  const DenseVector u = random_unit_vector(2, 1, 3, false), v = random_unit_vector(3, 1, 4, false);
  const Eigen::VectorXcd kv = Eigen::kroneckerProduct(to_eigen(u), to_eigen(v)).eval();
  EXPECT_LT((to_eigen(kron(u, v)) - kv).norm(), 1e-15);
}

TEST(kron, enforces_cap) {
  const SparseMatrix a = SparseMatrix::identity(64);
  EXPECT_THROW(kron(a, a, 1000), CapacityError);
}

TEST(vectors, inner_norm_distance) {
  const DenseVector a{{1, 1}, {0, 2}}, b{{0, 1}, {3, 0}};
  EXPECT_EQ(inner(a, b), std::conj(Complex(1, 1)) * Complex(0, 1) + std::conj(Complex(0, 2)) * Complex(3, 0));
  EXPECT_DOUBLE_EQ(norm(a), std::sqrt(6.0));
  EXPECT_DOUBLE_EQ(distance(a, a), 0.0);
  EXPECT_THROW(inner(a, DenseVector(3)), InvalidInput);
}

TEST(expm_action, matches_dense_exponential) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const SparseMatrix a = random_matrix(6, 6, s, 1, 0.5).scaled(0.7);
    if (a.empty()) continue;
    const DenseVector v = random_unit_vector(6, s, 2, false);
    for (double t : {0.0, 0.3, 2.5, -1.0}) {
      const Eigen::VectorXcd ref = (a.to_dense() * t).exp() * to_eigen(v);
      EXPECT_LT((to_eigen(expm_action(a, v, t, 1e-13)) - ref).norm(), 1e-11 * std::max(1.0, ref.norm()));
    }
  }
}

TEST(expm_action, rejects_bad_input) {
  const SparseMatrix a = SparseMatrix::identity(2);
  EXPECT_THROW(expm_action(a, DenseVector(3), 1.0), InvalidInput);
  EXPECT_THROW(expm_action(a, DenseVector(2), 1.0, 0.0), InvalidInput);
}

TEST(taylor_remainder_order, tail_meets_target) {
  for (double x : {0.1, 0.5, 1.0, 2.0})
    for (double target : {1e-3, 1e-8, 1e-14}) {
      const int K = taylor_remainder_order(x, target);
      // Independent tail: e^x minus the partial sum.
      double partial = 0.0, term = 1.0;
      for (int k = 0; k <= K; ++k) {
        partial += term;
        term *= x / (k + 1);
      }
      double tail = 0.0;
      for (int k = K + 1; k < K + 80; ++k) {
        tail += term;
        term *= x / (k + 1);
      }
      EXPECT_LE(tail, target * (1 + 1e-9)) << "x=" << x << " target=" << target;
      (void)partial;
    }
}

TEST(dense_expm, cap) {
  EXPECT_THROW(dense_expm(Eigen::MatrixXcd::Zero(kDenseExpmMaxDim + 1, kDenseExpmMaxDim + 1)), CapacityError);
  const Eigen::MatrixXcd z = Eigen::MatrixXcd::Zero(3, 3);
  EXPECT_LT((dense_expm(z) - Eigen::MatrixXcd::Identity(3, 3)).norm(), 1e-15);
}

TEST(json, sparse_and_vector_round_trip) {
  const SparseMatrix a = random_matrix(3, 9, 4, 1, 0.5);
  const SparseMatrix b = sparse_from_json(to_json(a));
  EXPECT_EQ(b.rows(), 3u);
  EXPECT_EQ(b.cols(), 9u);
  EXPECT_EQ((a - b).nnz(), 0u);
  const DenseVector v = random_unit_vector(5, 1, 1, false);
  EXPECT_EQ(vector_from_json(to_json(std::span<const Complex>(v))), v);
  EXPECT_THROW(sparse_from_json(nlohmann::json::parse(R"({"rows":2})")), InvalidInput);
}

TEST(limits, env_override) {
  setenv("CARLEMAN_SIM_MAX_ENTRIES", "1234", 1);
  EXPECT_EQ(default_max_entries(), 1234u);
  EXPECT_EQ(Limits::from_env().max_entries, 1234u);
  setenv("CARLEMAN_SIM_MAX_ENTRIES", "junk", 1);
  EXPECT_EQ(default_max_entries(), std::size_t{1} << 20);
  unsetenv("CARLEMAN_SIM_MAX_ENTRIES");
  EXPECT_EQ(default_max_entries(), std::size_t{1} << 20);
}
