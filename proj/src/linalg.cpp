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

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace carleman {

Limits Limits::from_env() {
  Limits limits;
  limits.max_entries = default_max_entries();
  return limits;
}

std::size_t default_max_entries() {
  std::size_t cap = std::size_t{1} << 20;
  if (const char* env = std::getenv("CARLEMAN_SIM_MAX_ENTRIES")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && value > 0) cap = static_cast<std::size_t>(value);
  }
  return cap;
}

SparseMatrix::SparseMatrix(std::size_t nrows, std::size_t ncols, std::vector<Triplet> entries)
    : rows_(nrows), cols_(ncols) {
  if (nrows == 0 || ncols == 0) throw InvalidInput("SparseMatrix: zero dimension");
  for (const auto& t : entries) {
    if (t.row >= nrows || t.col >= ncols) throw InvalidInput("SparseMatrix: entry out of range");
    if (!is_finite(t.value)) throw InvalidInput("SparseMatrix: non-finite entry");
  }
  std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  row_ptr_.assign(nrows + 1, 0);
  entries_.reserve(entries.size());
  std::size_t i = 0;
  while (i < entries.size()) {
    const std::size_t r = entries[i].row;
    const std::size_t c = entries[i].col;
    Complex sum = 0.0;
    while (i < entries.size() && entries[i].row == r && entries[i].col == c) sum += entries[i++].value;
    if (sum != Complex{0.0}) {
      entries_.push_back({c, sum});
      ++row_ptr_[r + 1];
    }
  }
  for (std::size_t r = 0; r < nrows; ++r) {
    sparsity_ = std::max(sparsity_, row_ptr_[r + 1]);
    row_ptr_[r + 1] += row_ptr_[r];
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
  return {n, n, std::move(t)};
}

SparseMatrix SparseMatrix::zero(std::size_t nrows, std::size_t ncols) { return {nrows, ncols, {}}; }

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& m, double drop_tol) {
  std::vector<Triplet> t;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (std::abs(m(i, j)) > drop_tol)
        t.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), m(i, j)});
  return {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()), std::move(t)};
}

void SparseMatrix::multiply(std::span<const Complex> x, std::span<Complex> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw InvalidInput("SparseMatrix::multiply: dimension mismatch");
  for (std::size_t r = 0; r < rows_; ++r) {
    Complex acc = 0.0;
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += entries_[k].value * x[entries_[k].col];
    y[r] = acc;
  }
}

DenseVector SparseMatrix::operator*(const DenseVector& x) const {
  DenseVector y(rows_);
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::adjoint() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& e : row(r)) t.push_back({e.col, r, std::conj(e.value)});
  return {cols_, rows_, std::move(t)};
}

SparseMatrix SparseMatrix::scaled(Complex s) const {
  std::vector<Triplet> t = triplets();
  for (auto& e : t) e.value *= s;
  return {rows_, cols_, std::move(t)};
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d = DenseMatrix::Zero(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& e : row(r)) d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(e.col)) = e.value;
  return d;
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r)
    for (const auto& e : row(r)) t.push_back({r, e.col, e.value});
  return t;
}

double SparseMatrix::norm_upper_bound() const {
  std::vector<double> col_sum(cols_, 0.0);
  double max_row = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (const auto& e : row(r)) {
      s += std::abs(e.value);
      col_sum[e.col] += std::abs(e.value);
    }
    max_row = std::max(max_row, s);
  }
  const double max_col = col_sum.empty() ? 0.0 : *std::max_element(col_sum.begin(), col_sum.end());
  return std::sqrt(max_row * max_col);
}

double SparseMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
  return m;
}

namespace {

SparseMatrix combine(const SparseMatrix& a, const SparseMatrix& b, double sign) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InvalidInput("SparseMatrix: shape mismatch");
  std::vector<Triplet> t = a.triplets();
  for (auto e : b.triplets()) {
    e.value *= sign;
    t.push_back(e);
  }
  return {a.rows(), a.cols(), std::move(t)};
}

}  // namespace

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, 1.0); }
SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, -1.0); }

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("SparseMatrix product: shape mismatch");
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (const auto& ea : a.row(r))
      for (const auto& eb : b.row(ea.col)) t.push_back({r, eb.col, ea.value * eb.value});
  return {a.rows(), b.cols(), std::move(t)};
}

double spectral_norm(const DenseMatrix& m) {
  if (m.size() == 0) throw InvalidInput("spectral_norm: empty matrix");
  Eigen::BDCSVD<DenseMatrix> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

double spectral_norm(const SparseMatrix& m, double tol) {
  if (m.rows() == 0 || m.cols() == 0) throw InvalidInput("spectral_norm: dimension zero");
  if (!(tol > 0)) throw InvalidInput("spectral_norm: tol must be positive");
  if (m.empty()) return 0.0;
  if (std::max(m.rows(), m.cols()) <= 512) return spectral_norm(m.to_dense());

  // Power iteration on M^H M from a fixed, dense starting vector.
  const SparseMatrix mh = m.adjoint();
  DenseVector x(m.cols()), y(m.rows()), z(m.cols());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = Complex{1.0 + 0.37 * std::sin(1.0 + i), 0.11 * std::cos(3.0 * i)};
  double nx = norm(x);
  for (auto& v : x) v /= nx;
  double sigma2 = 0.0;
  for (int it = 0; it < 10000; ++it) {
    m.multiply(x, y);
    mh.multiply(y, z);
    const double nz = norm(z);
    if (nz == 0.0) return 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = z[i] / nz;
    if (it > 2 && std::abs(nz - sigma2) <= 0.1 * tol * nz) {
      sigma2 = nz;
      break;
    }
    sigma2 = nz;
  }
  return std::sqrt(sigma2);
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b, std::size_t max_dim) {
  if (a.rows() == 0 || b.rows() == 0) throw InvalidInput("kron: empty factor");
  const double rows = static_cast<double>(a.rows()) * static_cast<double>(b.rows());
  const double cols = static_cast<double>(a.cols()) * static_cast<double>(b.cols());
  if (rows > static_cast<double>(max_dim) || cols > static_cast<double>(max_dim))
    throw CapacityError("kron: result dimension " + std::to_string(static_cast<long long>(std::max(rows, cols))) +
                        " exceeds cap " + std::to_string(max_dim));
  std::vector<Triplet> t;
  t.reserve(a.nnz() * b.nnz());
  for (std::size_t ra = 0; ra < a.rows(); ++ra)
    for (const auto& ea : a.row(ra))
      for (std::size_t rb = 0; rb < b.rows(); ++rb)
        for (const auto& eb : b.row(rb))
          t.push_back({ra * b.rows() + rb, ea.col * b.cols() + eb.col, ea.value * eb.value});
  return {a.rows() * b.rows(), a.cols() * b.cols(), std::move(t)};
}

SparseMatrix kron(std::span<const SparseMatrix> factors, std::size_t max_dim) {
  if (factors.empty()) throw InvalidInput("kron: no factors");
  SparseMatrix out = factors[0];
  if (out.rows() == 0) throw InvalidInput("kron: empty factor");
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i], max_dim);
  return out;
}

DenseVector kron(const DenseVector& a, const DenseVector& b) {
  DenseVector out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i * b.size() + j] = a[i] * b[j];
  return out;
}

double norm(std::span<const Complex> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw InvalidInput("inner: dimension mismatch");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double distance(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw InvalidInput("distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

int taylor_remainder_order(double x, double target) {
  x = std::abs(x);
  if (x == 0.0) return 1;
  // term = x^{K+1}/(K+1)!
  double term = x;
  for (int k = 1; k < 200; ++k) {
    term *= x / (k + 1);
    const double tail = term / std::max(1e-300, 1.0 - x / (k + 2));
    if (x < k + 2 && tail <= target) return k;
  }
  return 200;
}

DenseVector expm_action(const LinearOperator& op, double norm_bound, const DenseVector& v, double t, double tol) {
  if (!(tol > 0)) throw InvalidInput("expm_action: tol must be positive");
  const double scaled = std::abs(t) * norm_bound;
  if (scaled == 0.0) return v;
  const int substeps = std::max(1, static_cast<int>(std::ceil(scaled)));
  const double x = scaled / substeps;
  // Errors made early can be amplified by at most e^{|t| * bound} later.
  const double growth = std::exp(std::min(scaled, 700.0));
  const double budget = tol / (substeps * growth);
  const int order = taylor_remainder_order(x, budget);
  const double h = t / substeps;

  DenseVector w = v, term(v.size()), next(v.size());
  for (int s = 0; s < substeps; ++s) {
    term = w;
    for (int k = 1; k <= order; ++k) {
      op(term, next);
      const double c = h / k;
      for (std::size_t i = 0; i < w.size(); ++i) {
        term[i] = c * next[i];
        w[i] += term[i];
      }
    }
  }
  return w;
}

DenseVector expm_action(const SparseMatrix& m, const DenseVector& v, double t, double tol) {
  if (m.rows() != m.cols()) throw InvalidInput("expm_action: matrix is not square");
  if (m.cols() != v.size()) throw InvalidInput("expm_action: dimension mismatch");
  LinearOperator op = [&m](std::span<const Complex> in, std::span<Complex> out) { m.multiply(in, out); };
  return expm_action(op, m.norm_upper_bound(), v, t, tol);
}

DenseMatrix dense_expm(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw InvalidInput("dense_expm: matrix is not square");
  if (static_cast<std::size_t>(m.rows()) > kDenseExpmMaxDim)
    throw CapacityError("dense_expm: dimension " + std::to_string(m.rows()) + " exceeds cap " +
                        std::to_string(kDenseExpmMaxDim));
  return m.exp();
}

nlohmann::json to_json(const SparseMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& t : m.triplets()) entries.push_back({t.row, t.col, t.value.real(), t.value.imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

SparseMatrix sparse_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("entries"))
    throw InvalidInput("matrix JSON requires rows, cols and entries");
  std::vector<Triplet> t;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 4) throw InvalidInput("matrix entry must be [row, col, re, im]");
    if (!e[0].is_number_unsigned() || !e[1].is_number_unsigned())
      throw InvalidInput("matrix entry indices must be non-negative integers");
    t.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), {e[2].get<double>(), e[3].get<double>()}});
  }
  return {j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), std::move(t)};
}

nlohmann::json to_json(std::span<const Complex> v) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& z : v) out.push_back({z.real(), z.imag()});
  return out;
}

DenseVector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("vector JSON must be an array of [re, im] pairs");
  DenseVector v;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw InvalidInput("vector entry must be [re, im]");
    Complex z{e[0].get<double>(), e[1].get<double>()};
    if (!is_finite(z)) throw InvalidInput("vector entry is not finite");
    v.push_back(z);
  }
  if (v.empty()) throw InvalidInput("vector JSON is empty");
  return v;
}

}  // namespace carleman
