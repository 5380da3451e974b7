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

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "carleman/instances.hpp"
#include "carleman/problem.hpp"

namespace carleman::testing {

inline Eigen::MatrixXcd eye(Eigen::Index n) { return Eigen::MatrixXcd::Identity(n, n); }

inline Eigen::MatrixXcd kron_pow_eye(Eigen::Index N, int p) {
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(1, 1);
  for (int i = 0; i < p; ++i) r = Eigen::kroneckerProduct(r, eye(N)).eval();
  return r;
}

// sum_q I^{(x)q} (x) X (x) I^{(x)(p-q-1)} built from explicit Kronecker products.
inline Eigen::MatrixXcd kron_sum(const Eigen::MatrixXcd& X, Eigen::Index N, int p) {
  const Eigen::Index rows = X.rows() * static_cast<Eigen::Index>(std::pow(N, p - 1));
  const Eigen::Index cols = X.cols() * static_cast<Eigen::Index>(std::pow(N, p - 1));
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, cols);
  for (int q = 0; q < p; ++q) {
    Eigen::MatrixXcd left = kron_pow_eye(N, q);
    Eigen::MatrixXcd right = kron_pow_eye(N, p - q - 1);
    out += Eigen::kroneckerProduct(Eigen::kroneckerProduct(left, X).eval(), right).eval();
  }
  return out;
}

// Dense truncated Carleman matrix on levels lo..hi (levels lo..hi kept).
inline Eigen::MatrixXcd dense_carleman(const QuadraticSystem& sys, int lo, int hi) {
  const Eigen::MatrixXcd A = sys.A.to_dense(), B = sys.B.to_dense();
  const auto N = static_cast<Eigen::Index>(sys.dim());
  std::vector<Eigen::Index> off{0};
  for (int p = lo; p <= hi; ++p) off.push_back(off.back() + static_cast<Eigen::Index>(std::pow(N, p)));
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(off.back(), off.back());
  for (int p = lo; p <= hi; ++p) {
    const auto i = p - lo;
    const Eigen::MatrixXcd Ap = kron_sum(A, N, p);
    G.block(off[i], off[i], Ap.rows(), Ap.cols()) = Ap;
    if (p < hi) {
      const Eigen::MatrixXcd Bp = kron_sum(B, N, p);
      G.block(off[i], off[i + 1], Bp.rows(), Bp.cols()) = Bp;
    }
  }
  return G;
}

inline Eigen::VectorXcd to_eigen(const DenseVector& v) {
  Eigen::VectorXcd r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) r(static_cast<Eigen::Index>(i)) = v[i];
  return r;
}

inline DenseVector from_eigen(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

inline double max_diff(const DenseVector& a, const DenseVector& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Random (generally non-unitary) quadratic system with given norms.
inline QuadraticSystem random_system(std::size_t N, std::uint64_t seed, double normA = 1.0, double normB = 0.5,
                                     double density = 1.0) {
  SparseMatrix A = random_matrix(N, N, seed, 11, density);
  SparseMatrix B = random_matrix(N, N * N, seed, 12, density);
  if (A.empty()) A = SparseMatrix::identity(N);
  if (B.empty()) B = SparseMatrix(N, N * N, {{0, 0, 1.0}});
  return QuadraticSystem::make(A.scaled(normA / spectral_norm(A)), B.scaled(normB / spectral_norm(B)));
}

}  // namespace carleman::testing
