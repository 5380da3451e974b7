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

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace carleman {

using Complex = std::complex<double>;
using DenseVector = std::vector<Complex>;
using DenseMatrix = Eigen::MatrixXcd;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Hard caps for desk-scale runs. CARLEMAN_SIM_MAX_ENTRIES overrides the
// default entry cap of 2^20.
struct Limits {
  std::size_t max_entries = std::size_t{1} << 20;
  std::size_t max_steps = std::size_t{1} << 24;
  std::size_t max_levels = std::size_t{1} << 16;

  static Limits from_env();
};

std::size_t default_max_entries();

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

struct Triplet {
  std::size_t row = 0;
  std::size_t col = 0;
  Complex value;
};

/// Compressed row storage with sorted, strictly increasing column indices and
/// no explicit zeros. Immutable after construction.
class SparseMatrix {
 public:
  struct Entry {
    std::size_t col = 0;
    Complex value;
  };

  SparseMatrix() = default;

  /// Duplicate coordinates are summed; entries that sum to zero are dropped.
  SparseMatrix(std::size_t nrows, std::size_t ncols, std::vector<Triplet> entries);

  static SparseMatrix identity(std::size_t n);
  static SparseMatrix zero(std::size_t nrows, std::size_t ncols);
  static SparseMatrix from_dense(const DenseMatrix& m, double drop_tol = 0.0);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return entries_.size(); }
  std::size_t sparsity() const { return sparsity_; }
  bool empty() const { return entries_.empty(); }

  std::span<const Entry> row(std::size_t i) const {
    return {entries_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  /// y = M x. y must not alias x.
  void multiply(std::span<const Complex> x, std::span<Complex> y) const;
  DenseVector operator*(const DenseVector& x) const;

  SparseMatrix adjoint() const;
  SparseMatrix scaled(Complex s) const;
  DenseMatrix to_dense() const;
  std::vector<Triplet> triplets() const;

  // Cheap upper bound on the spectral norm: sqrt(|M|_1 |M|_inf).
  double norm_upper_bound() const;
  double max_abs() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::size_t sparsity_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<Entry> entries_;
};

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);

/// Exact (dense SVD) when max(rows, cols) <= 512, power iteration on M^H M
/// otherwise. Relative accuracy tol in the iterative regime.
double spectral_norm(const SparseMatrix& m, double tol = 1e-8);
double spectral_norm(const DenseMatrix& m);

SparseMatrix kron(std::span<const SparseMatrix> factors, std::size_t max_dim = default_max_entries());
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b, std::size_t max_dim = default_max_entries());
DenseVector kron(const DenseVector& a, const DenseVector& b);

double norm(std::span<const Complex> v);
/// <a, b> with a conjugated.
Complex inner(std::span<const Complex> a, std::span<const Complex> b);
double distance(std::span<const Complex> a, std::span<const Complex> b);

using LinearOperator = std::function<void(std::span<const Complex>, std::span<Complex>)>;

/// e^{tM} v by scaling into substeps with |tM|/s <= 1 and a truncated Taylor
/// series per substep. The order is the smallest K whose remainder bound
/// x^{K+1}/(K+1)! / (1 - x/(K+2)) meets the per-substep budget.
DenseVector expm_action(const SparseMatrix& m, const DenseVector& v, double t, double tol = 1e-12);

/// Same scheme for a matrix-free operator with a known spectral-norm bound.
DenseVector expm_action(const LinearOperator& op, double norm_bound, const DenseVector& v, double t,
                        double tol = 1e-12);

/// Smallest K such that the Taylor remainder of e^x past order K is <= target.
int taylor_remainder_order(double x, double target);

constexpr std::size_t kDenseExpmMaxDim = 1024;

/// e^M by scaling and squaring with Pade approximation.
DenseMatrix dense_expm(const DenseMatrix& m);

nlohmann::json to_json(const SparseMatrix& m);
SparseMatrix sparse_from_json(const nlohmann::json& j);
nlohmann::json to_json(std::span<const Complex> v);
DenseVector vector_from_json(const nlohmann::json& j);

}  // namespace carleman
