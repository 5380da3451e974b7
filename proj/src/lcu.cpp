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

#include <algorithm>
#include <cmath>

#include "carleman/evolve.hpp"

namespace carleman {

std::vector<SparseMatrix> one_sparse_pieces(const SparseMatrix& M) {
  std::vector<std::vector<std::size_t>> row_colors(M.rows()), col_colors(M.cols());
  std::vector<std::vector<Triplet>> pieces;
  auto used = [](const std::vector<std::size_t>& colors, std::size_t c) {
    return std::find(colors.begin(), colors.end(), c) != colors.end();
  };
  for (const auto& t : M.triplets()) {
    std::size_t color = 0;
    while (used(row_colors[t.row], color) || used(col_colors[t.col], color)) ++color;
    row_colors[t.row].push_back(color);
    col_colors[t.col].push_back(color);
    if (color >= pieces.size()) pieces.resize(color + 1);
    pieces[color].push_back(t);
  }
  std::vector<SparseMatrix> out;
  out.reserve(pieces.size());
  for (auto& p : pieces) out.emplace_back(M.rows(), M.cols(), std::move(p));
  return out;
}

SparseMatrix b_plus_embedding(const SparseMatrix& B) {
  const std::size_t n = B.rows() + B.cols();
  std::vector<Triplet> t;
  for (const auto& e : B.triplets()) {
    t.push_back({e.row, B.rows() + e.col, e.value});
    t.push_back({B.rows() + e.col, e.row, std::conj(e.value)});
  }
  return {n, n, std::move(t)};
}

SparseMatrix b_minus_embedding(const SparseMatrix& B) {
  const std::size_t n = B.rows() + B.cols();
  std::vector<Triplet> t;
  for (const auto& e : B.triplets()) {
    t.push_back({e.row, B.rows() + e.col, e.value});
    t.push_back({B.rows() + e.col, e.row, -std::conj(e.value)});
  }
  return {n, n, std::move(t)};
}

UnitaryTermSum lcu_decompose(const SparseMatrix& M) {
  if (M.rows() != M.cols()) throw InvalidInput("lcu_decompose: matrix must be square");
  const std::size_t n = M.rows();
  UnitaryTermSum sum;
  sum.dim = n;
  const auto pieces = one_sparse_pieces(M);
  sum.colors = pieces.size();
  for (const auto& piece : pieces) {
    const double alpha = piece.max_abs();
    std::vector<std::size_t> col(n, n);
    std::vector<Complex> value(n, 0.0);
    std::vector<bool> col_taken(n, false);
    bool uniform = piece.nnz() == n;
    for (std::size_t r = 0; r < n; ++r) {
      for (const auto& e : piece.row(r)) {
        col[r] = e.col;
        value[r] = e.value;
        col_taken[e.col] = true;
        if (std::abs(std::abs(e.value) - alpha) > 1e-14 * alpha) uniform = false;
      }
    }
    if (uniform) {
      OneSparseUnitary U{col, {}};
      U.phase.reserve(n);
      for (const auto& z : value) U.phase.push_back(z / std::abs(z));
      sum.terms.push_back({alpha, std::move(U)});
      sum.a += alpha;
      continue;
    }
    // Complete the partial permutation with zero-valued positions.
    std::size_t free_col = 0;
    for (std::size_t r = 0; r < n; ++r) {
      if (col[r] != n) continue;
      while (col_taken[free_col]) ++free_col;
      col[r] = free_col;
      col_taken[free_col] = true;
    }
    OneSparseUnitary plus{col, std::vector<Complex>(n)}, minus{col, std::vector<Complex>(n)};
    for (std::size_t r = 0; r < n; ++r) {
      const double mag = std::abs(value[r]);
      const double phi = mag > 0 ? std::arg(value[r]) : 0.0;
      const double theta = std::acos(std::clamp(mag / alpha, 0.0, 1.0));
      plus.phase[r] = std::polar(1.0, phi + theta);
      minus.phase[r] = std::polar(1.0, phi - theta);
    }
    sum.terms.push_back({alpha / 2, std::move(plus)});
    sum.terms.push_back({alpha / 2, std::move(minus)});
    sum.a += alpha;
  }
  return sum;
}

UnitaryTermSum lcu_decompose(const LevelOperator& level) {
  const SparseMatrix M = level.to_sparse();
  if (M.rows() == M.cols()) return lcu_decompose(M);
  return lcu_decompose(b_plus_embedding(M));
}

SparseMatrix reconstruct(const UnitaryTermSum& sum, double drop_tol) {
  std::vector<Triplet> t;
  for (const auto& term : sum.terms)
    for (std::size_t r = 0; r < sum.dim; ++r) t.push_back({r, term.U.col[r], term.alpha * term.U.phase[r]});
  SparseMatrix raw(sum.dim, sum.dim, std::move(t));
  if (drop_tol <= 0) return raw;
  std::vector<Triplet> kept;
  for (const auto& e : raw.triplets())
    if (std::abs(e.value) > drop_tol) kept.push_back(e);
  return {sum.dim, sum.dim, std::move(kept)};
}

std::size_t lcu_term_bound(std::size_t d, std::size_t N) {
  const auto log_factor = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(std::max<std::size_t>(N, 1))) + 1));
  return 4 * d * d * log_factor;
}

}  // namespace carleman
