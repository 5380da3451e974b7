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

#include <memory>
#include <span>

#include "carleman/problem.hpp"

namespace carleman {

/// Levels 1..m stored contiguously; level p holds N^p entries indexed
/// big-endian, index(i_1..i_p) = sum_q i_q N^{p-q}.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(std::size_t N, int levels, std::size_t max_entries = default_max_entries());

  std::size_t base_dim() const { return N_; }
  int levels() const { return levels_; }
  std::size_t size() const { return data_.size(); }
  std::size_t offset(int p) const { return offsets_[p - 1]; }
  std::size_t level_dim(int p) const { return offsets_[p] - offsets_[p - 1]; }
  /// Entries in levels 1..p.
  std::size_t prefix_size(int p) const { return offsets_[p]; }

  std::span<Complex> block(int p) { return {data_.data() + offset(p), level_dim(p)}; }
  std::span<const Complex> block(int p) const { return {data_.data() + offset(p), level_dim(p)}; }
  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

  BlockVector truncated(int p) const;
  double norm() const;

 private:
  std::size_t N_ = 0;
  int levels_ = 0;
  std::vector<std::size_t> offsets_{0};
  DenseVector data_;
};

/// Total entries of levels 1..m; throws CapacityError above max_entries.
std::size_t block_entries(std::size_t N, int m, std::size_t max_entries = default_max_entries());

void set_workers(int workers);
int workers();

namespace kernels {

// out (level p) += A_p in (level p), A_p = sum_q I^{(x)q} (x) A (x) I^{(x)(p-q-1)}.
void apply_A_level(const SparseMatrix& A, std::size_t N, int p, const Complex* in, Complex* out);
// out (level p) += B_p in (level p+1).
void apply_B_level(const SparseMatrix& B, std::size_t N, int p, const Complex* in, Complex* out);
// out (level p+1) += B_p^H in (level p).
void apply_BH_level(const SparseMatrix& B, std::size_t N, int p, const Complex* in, Complex* out);

// Single-threaded gather forms using explicit digit arithmetic.
void apply_A_level_serial(const SparseMatrix& A, std::size_t N, int p, const Complex* in, Complex* out);
void apply_B_level_serial(const SparseMatrix& B, std::size_t N, int p, const Complex* in, Complex* out);

}  // namespace kernels

enum class LevelKind { A, B };

/// A_p (N^p -> N^p) or B_p (N^{p+1} -> N^p) applied without materializing.
class LevelOperator {
 public:
  LevelOperator(std::shared_ptr<const QuadraticSystem> sys, int p, LevelKind kind,
                std::size_t max_entries = default_max_entries());

  int level() const { return p_; }
  LevelKind kind() const { return kind_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const QuadraticSystem& system() const { return *sys_; }

  /// out = Op in.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  /// p ||A|| or p ||B||.
  double norm_bound() const;
  SparseMatrix to_sparse(std::size_t max_dim = 1 << 14) const;

 private:
  std::shared_ptr<const QuadraticSystem> sys_;
  int p_;
  LevelKind kind_;
  std::size_t rows_;
  std::size_t cols_;
};

LevelOperator build_level(std::shared_ptr<const QuadraticSystem> sys, int p, LevelKind kind);

/// Truncated block-bidiagonal G_m: diagonal blocks A_p, superdiagonal B_p.
class CarlemanMatrix {
 public:
  CarlemanMatrix(std::shared_ptr<const QuadraticSystem> sys, int m, std::size_t max_entries = default_max_entries());

  int levels() const { return m_; }
  std::size_t dim() const { return dim_; }
  const QuadraticSystem& system() const { return *sys_; }
  std::shared_ptr<const QuadraticSystem> system_ptr() const { return sys_; }

  /// out = G_m in over all m levels.
  void apply(std::span<const Complex> in, std::span<Complex> out) const;
  /// First row_levels block rows of the untruncated operator: out_p =
  /// A_p in_p + B_p in_{p+1} for p <= row_levels, with in_{m+1} = 0.
  void apply_rows(std::span<const Complex> in, std::span<Complex> out, int row_levels) const;
  void apply_serial(std::span<const Complex> in, std::span<Complex> out) const;

  /// m (||A|| + ||B||), an upper bound on ||G_m||.
  double norm_bound() const;
  DenseMatrix densify(std::size_t max_dim = 4096) const;

 private:
  std::shared_ptr<const QuadraticSystem> sys_;
  int m_;
  std::size_t dim_;
  std::vector<std::size_t> offsets_;
};

BlockVector apply_G(const CarlemanMatrix& G, const BlockVector& v);
BlockVector apply_G_serial(const CarlemanMatrix& G, const BlockVector& v);

/// Block p = u^{(x)p}.
BlockVector lift_state(const DenseVector& u, int m, std::size_t max_entries = default_max_entries());

/// max_p || d(u^{(x)p})/dt - (A_p u_p + B_p u_{p+1}) || over p <= m.
double carleman_derivative_check(const QuadraticSystem& sys, const DenseVector& u, int m);

/// ||F_{m,m+k}(t)||, the (m, m+k) block of e^{G t}.
double carleman_block_norm(const QuadraticSystem& sys, int m, int k, double t);
/// norms[i][k] = ||F_{m,m+k}(times[i])|| for k <= kmax; times sorted.
std::vector<std::vector<double>> carleman_block_norms(const QuadraticSystem& sys, int m, int kmax,
                                                     const std::vector<double>& times);

nlohmann::json to_json(const BlockVector& v);
BlockVector block_vector_from_json(const nlohmann::json& j);

}  // namespace carleman
