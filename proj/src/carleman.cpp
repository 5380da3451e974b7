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

#include "carleman/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <omp.h>

namespace carleman {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

constexpr std::size_t kParallelThreshold = 1 << 12;

}  // namespace

std::size_t block_entries(std::size_t N, int m, std::size_t max_entries) {
  if (N == 0) throw InvalidInput("block vector: base dimension must be positive");
  if (m < 1) throw InvalidInput("block vector: need at least one level");
  double total = 0.0, level = 1.0;
  for (int p = 1; p <= m; ++p) {
    level *= static_cast<double>(N);
    total += level;
    if (total > static_cast<double>(max_entries))
      throw CapacityError("block vector with N=" + std::to_string(N) + " and " + std::to_string(m) +
                          " levels exceeds the cap of " + std::to_string(max_entries) + " entries");
  }
  return static_cast<std::size_t>(total);
}

BlockVector::BlockVector(std::size_t N, int levels, std::size_t max_entries) : N_(N), levels_(levels) {
  const std::size_t total = block_entries(N, levels, max_entries);
  offsets_.assign(levels + 1, 0);
  std::size_t d = 1;
  for (int p = 1; p <= levels; ++p) {
    d *= N;
    offsets_[p] = offsets_[p - 1] + d;
  }
  data_.assign(total, 0.0);
}

BlockVector BlockVector::truncated(int p) const {
  if (p < 1 || p > levels_) throw InvalidInput("block vector: truncation level out of range");
  BlockVector out(N_, p, std::max(prefix_size(p), std::size_t{1}));
  std::copy(data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(prefix_size(p)), out.data_.begin());
  return out;
}

double BlockVector::norm() const { return carleman::norm(data_); }

void set_workers(int workers) {
  if (workers < 1) throw InvalidInput("workers must be at least 1");
  omp_set_num_threads(workers);
}

int workers() { return omp_get_max_threads(); }

namespace kernels {

void apply_A_level(const SparseMatrix& A, std::size_t N, int p, const Complex* in, Complex* out) {
  const std::size_t dim = ipow(N, p);
  for (int q = 0; q < p; ++q) {
    const std::size_t inner = ipow(N, p - q - 1);
    const auto total = static_cast<std::ptrdiff_t>(dim / inner);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
    for (std::ptrdiff_t ox = 0; ox < total; ++ox) {
      const std::size_t o = static_cast<std::size_t>(ox) / N;
      const std::size_t x = static_cast<std::size_t>(ox) % N;
      Complex* dst = out + static_cast<std::size_t>(ox) * inner;
      for (const auto& e : A.row(x)) {
        const Complex a = e.value;
        const Complex* src = in + (o * N + e.col) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += a * src[i];
      }
    }
  }
}

void apply_B_level(const SparseMatrix& B, std::size_t N, int p, const Complex* in, Complex* out) {
  const std::size_t dim = ipow(N, p);
  const std::size_t NN = N * N;
  for (int q = 0; q < p; ++q) {
    const std::size_t inner = ipow(N, p - q - 1);
    const auto total = static_cast<std::ptrdiff_t>(dim / inner);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
    for (std::ptrdiff_t ox = 0; ox < total; ++ox) {
      const std::size_t o = static_cast<std::size_t>(ox) / N;
      const std::size_t x = static_cast<std::size_t>(ox) % N;
      Complex* dst = out + static_cast<std::size_t>(ox) * inner;
      for (const auto& e : B.row(x)) {
        const Complex b = e.value;
        const Complex* src = in + (o * NN + e.col) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += b * src[i];
      }
    }
  }
}

void apply_BH_level(const SparseMatrix& B, std::size_t N, int p, const Complex* in, Complex* out) {
  const std::size_t dim = ipow(N, p);
  const std::size_t NN = N * N;
  for (int q = 0; q < p; ++q) {
    const std::size_t inner = ipow(N, p - q - 1);
    const std::size_t total = dim / inner;
    for (std::size_t ox = 0; ox < total; ++ox) {
      const std::size_t o = ox / N;
      const std::size_t x = ox % N;
      const Complex* src = in + ox * inner;
      for (const auto& e : B.row(x)) {
        const Complex b = std::conj(e.value);
        Complex* dst = out + (o * NN + e.col) * inner;
        for (std::size_t i = 0; i < inner; ++i) dst[i] += b * src[i];
      }
    }
  }
}

void apply_A_level_serial(const SparseMatrix& A, std::size_t N, int p, const Complex* in, Complex* out) {
  const std::size_t dim = ipow(N, p);
  std::vector<std::size_t> digit(p), weight(p);
  for (int q = 0; q < p; ++q) weight[q] = ipow(N, p - q - 1);
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t rest = r;
    for (int q = 0; q < p; ++q) {
      digit[q] = rest / weight[q];
      rest %= weight[q];
    }
    Complex acc = 0.0;
    for (int q = 0; q < p; ++q) {
      const std::size_t base = r - digit[q] * weight[q];
      for (const auto& e : A.row(digit[q])) acc += e.value * in[base + e.col * weight[q]];
    }
    out[r] += acc;
  }
}

void apply_B_level_serial(const SparseMatrix& B, std::size_t N, int p, const Complex* in, Complex* out) {
  const std::size_t dim = ipow(N, p);
  std::vector<std::size_t> digit(p), weight(p);
  for (int q = 0; q < p; ++q) weight[q] = ipow(N, p - q - 1);
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t rest = r;
    for (int q = 0; q < p; ++q) {
      digit[q] = rest / weight[q];
      rest %= weight[q];
    }
    Complex acc = 0.0;
    for (int q = 0; q < p; ++q) {
      // Digits before q keep their place value scaled by N, digit q
      // becomes the pair (y, z) = c, digits after q are unchanged.
      const std::size_t high = r / (weight[q] * N);
      const std::size_t low = r % weight[q];
      for (const auto& e : B.row(digit[q])) acc += e.value * in[((high * N * N) + e.col) * weight[q] + low];
    }
    out[r] += acc;
  }
}

}  // namespace kernels

LevelOperator::LevelOperator(std::shared_ptr<const QuadraticSystem> sys, int p, LevelKind kind,
                             std::size_t max_entries)
    : sys_(std::move(sys)), p_(p), kind_(kind) {
  if (!sys_) throw InvalidInput("level operator: null system");
  if (p < 1) throw InvalidInput("level operator: p must be at least 1");
  const std::size_t N = sys_->dim();
  block_entries(N, kind == LevelKind::A ? p : p + 1, max_entries);
  rows_ = ipow(N, p);
  cols_ = kind == LevelKind::A ? rows_ : rows_ * N;
}

void LevelOperator::apply(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != cols_ || out.size() != rows_) throw InvalidInput("level operator: dimension mismatch");
  std::fill(out.begin(), out.end(), Complex{0.0});
  if (kind_ == LevelKind::A)
    kernels::apply_A_level(sys_->A, sys_->dim(), p_, in.data(), out.data());
  else
    kernels::apply_B_level(sys_->B, sys_->dim(), p_, in.data(), out.data());
}

double LevelOperator::norm_bound() const { return p_ * (kind_ == LevelKind::A ? sys_->normA : sys_->normB); }

SparseMatrix LevelOperator::to_sparse(std::size_t max_dim) const {
  if (std::max(rows_, cols_) > max_dim) throw CapacityError("level operator: too large to materialize");
  const std::size_t N = sys_->dim();
  std::vector<Triplet> t;
  const SparseMatrix& M = kind_ == LevelKind::A ? sys_->A : sys_->B;
  const std::size_t width = kind_ == LevelKind::A ? N : N * N;
  for (int q = 0; q < p_; ++q) {
    const std::size_t inner = ipow(N, p_ - q - 1);
    const std::size_t outer = ipow(N, q);
    for (std::size_t o = 0; o < outer; ++o)
      for (std::size_t x = 0; x < N; ++x)
        for (const auto& e : M.row(x))
          for (std::size_t i = 0; i < inner; ++i)
            t.push_back({(o * N + x) * inner + i, (o * width + e.col) * inner + i, e.value});
  }
  return {rows_, cols_, std::move(t)};
}

LevelOperator build_level(std::shared_ptr<const QuadraticSystem> sys, int p, LevelKind kind) {
  return {std::move(sys), p, kind};
}

CarlemanMatrix::CarlemanMatrix(std::shared_ptr<const QuadraticSystem> sys, int m, std::size_t max_entries)
    : sys_(std::move(sys)), m_(m) {
  if (!sys_) throw InvalidInput("carleman matrix: null system");
  dim_ = block_entries(sys_->dim(), m, max_entries);
  offsets_.assign(m + 1, 0);
  std::size_t d = 1;
  for (int p = 1; p <= m; ++p) {
    d *= sys_->dim();
    offsets_[p] = offsets_[p - 1] + d;
  }
}

void CarlemanMatrix::apply_rows(std::span<const Complex> in, std::span<Complex> out, int row_levels) const {
  if (row_levels < 1 || row_levels > m_) throw InvalidInput("carleman matrix: row levels out of range");
  if (in.size() != dim_ || out.size() != offsets_[row_levels])
    throw InvalidInput("carleman matrix: block vector does not match the truncation level");
  std::fill(out.begin(), out.end(), Complex{0.0});
  const std::size_t N = sys_->dim();
  for (int p = 1; p <= row_levels; ++p) {
    Complex* dst = out.data() + offsets_[p - 1];
    if (!sys_->A.empty()) kernels::apply_A_level(sys_->A, N, p, in.data() + offsets_[p - 1], dst);
    if (p < m_ && !sys_->B.empty()) kernels::apply_B_level(sys_->B, N, p, in.data() + offsets_[p], dst);
  }
}

void CarlemanMatrix::apply(std::span<const Complex> in, std::span<Complex> out) const { apply_rows(in, out, m_); }

void CarlemanMatrix::apply_serial(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != dim_ || out.size() != dim_) throw InvalidInput("carleman matrix: dimension mismatch");
  std::fill(out.begin(), out.end(), Complex{0.0});
  const std::size_t N = sys_->dim();
  for (int p = 1; p <= m_; ++p) {
    Complex* dst = out.data() + offsets_[p - 1];
    kernels::apply_A_level_serial(sys_->A, N, p, in.data() + offsets_[p - 1], dst);
    if (p < m_) kernels::apply_B_level_serial(sys_->B, N, p, in.data() + offsets_[p], dst);
  }
}

double CarlemanMatrix::norm_bound() const { return m_ * (sys_->normA + sys_->normB); }

DenseMatrix CarlemanMatrix::densify(std::size_t max_dim) const {
  if (dim_ > max_dim) throw CapacityError("carleman matrix: dimension " + std::to_string(dim_) + " too large to densify");
  const auto d = static_cast<Eigen::Index>(dim_);
  DenseMatrix out = DenseMatrix::Zero(d, d);
  for (int p = 1; p <= m_; ++p) {
    const auto ro = static_cast<Eigen::Index>(offsets_[p - 1]);
    for (const auto& t : build_level(sys_, p, LevelKind::A).to_sparse(max_dim).triplets())
      out(ro + static_cast<Eigen::Index>(t.row), ro + static_cast<Eigen::Index>(t.col)) += t.value;
    if (p < m_) {
      const auto co = static_cast<Eigen::Index>(offsets_[p]);
      for (const auto& t : build_level(sys_, p, LevelKind::B).to_sparse(max_dim).triplets())
        out(ro + static_cast<Eigen::Index>(t.row), co + static_cast<Eigen::Index>(t.col)) += t.value;
    }
  }
  return out;
}

BlockVector apply_G(const CarlemanMatrix& G, const BlockVector& v) {
  if (v.levels() != G.levels() || v.base_dim() != G.system().dim())
    throw InvalidInput("apply_G: block vector levels do not match the operator");
  BlockVector out(v.base_dim(), v.levels(), v.size());
  G.apply(v.data(), out.data());
  return out;
}

BlockVector apply_G_serial(const CarlemanMatrix& G, const BlockVector& v) {
  if (v.levels() != G.levels() || v.base_dim() != G.system().dim())
    throw InvalidInput("apply_G: block vector levels do not match the operator");
  BlockVector out(v.base_dim(), v.levels(), v.size());
  G.apply_serial(v.data(), out.data());
  return out;
}

BlockVector lift_state(const DenseVector& u, int m, std::size_t max_entries) {
  BlockVector out(u.size(), m, max_entries);
  const std::size_t N = u.size();
  auto first = out.block(1);
  std::copy(u.begin(), u.end(), first.begin());
  for (int p = 2; p <= m; ++p) {
    auto prev = out.block(p - 1);
    auto cur = out.block(p);
    for (std::size_t i = 0; i < prev.size(); ++i)
      for (std::size_t j = 0; j < N; ++j) cur[i * N + j] = prev[i] * u[j];
  }
  return out;
}

double carleman_derivative_check(const QuadraticSystem& sys, const DenseVector& u, int m) {
  if (u.size() != sys.dim()) throw InvalidInput("derivative check: dimension mismatch");
  const DenseVector f = sys.rhs(u);
  auto shared = std::make_shared<const QuadraticSystem>(sys);
  const BlockVector lifted = lift_state(u, m + 1);
  CarlemanMatrix G(shared, m + 1);
  std::vector<Complex> gv(lifted.prefix_size(m));
  G.apply_rows(lifted.data(), gv, m);

  double worst = 0.0;
  std::vector<DenseVector> powers{{Complex{1.0}}};
  for (int p = 1; p <= m; ++p) powers.push_back(kron(powers.back(), u));
  for (int p = 1; p <= m; ++p) {
    // Product rule: sum_q u^{(x)q} (x) f (x) u^{(x)(p-q-1)}.
    DenseVector d(powers[p].size(), 0.0);
    for (int q = 0; q < p; ++q) {
      const DenseVector term = kron(kron(powers[q], f), powers[p - q - 1]);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += term[i];
    }
    const std::span<const Complex> lhs(gv.data() + lifted.offset(p), lifted.level_dim(p));
    worst = std::max(worst, distance(d, lhs));
  }
  return worst;
}

std::vector<std::vector<double>> carleman_block_norms(const QuadraticSystem& sys, int m, int kmax,
                                                     const std::vector<double>& times) {
  if (m < 1 || kmax < 0) throw InvalidInput("block norm: need m >= 1, k >= 0");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0))
    throw InvalidInput("block norm: times must be sorted and non-negative");
  const std::size_t N = sys.dim();
  // Window of levels m..m+kmax; G is block upper triangular, so block
  // (m, m+k) of e^{G t} only sees levels m..m+k. Rows of F_{m,m+k} are
  // conjugated columns of e^{G^H t} restricted to the window.
  std::vector<std::size_t> off(kmax + 2, 0);
  for (int i = 0; i <= kmax; ++i) off[i + 1] = off[i] + ipow(N, m + i);
  const std::size_t total = off[kmax + 1];
  if (total > default_max_entries()) throw CapacityError("block norm: window exceeds cap");
  const SparseMatrix AH = sys.A.adjoint();
  LinearOperator op = [&](std::span<const Complex> in, std::span<Complex> out) {
    std::fill(out.begin(), out.end(), Complex{0.0});
    for (int i = 0; i <= kmax; ++i) {
      const int p = m + i;
      kernels::apply_A_level(AH, N, p, in.data() + off[i], out.data() + off[i]);
      if (i < kmax) kernels::apply_BH_level(sys.B, N, p, in.data() + off[i], out.data() + off[i + 1]);
    }
  };
  const double bound = (m + kmax) * (sys.normA + sys.normB);
  const std::size_t nrows = ipow(N, m);
  // rows[t][k] holds F_{m,m+k}(t).
  std::vector<std::vector<DenseMatrix>> rows(times.size());
  for (auto& per_t : rows)
    for (int k = 0; k <= kmax; ++k)
      per_t.emplace_back(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(ipow(N, m + k)));
  for (std::size_t r = 0; r < nrows; ++r) {
    DenseVector w(total, 0.0);
    w[r] = 1.0;
    double now = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
      if (times[ti] > now) w = expm_action(op, bound, w, times[ti] - now, 1e-28);
      now = times[ti];
      for (int k = 0; k <= kmax; ++k)
        for (std::size_t c = 0; c < ipow(N, m + k); ++c)
          rows[ti][k](static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = std::conj(w[off[k] + c]);
    }
  }
  std::vector<std::vector<double>> norms(times.size(), std::vector<double>(kmax + 1));
  for (std::size_t ti = 0; ti < times.size(); ++ti)
    for (int k = 0; k <= kmax; ++k) {
      const DenseMatrix gram = rows[ti][k] * rows[ti][k].adjoint();
      Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram, Eigen::EigenvaluesOnly);
      norms[ti][k] = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
    }
  return norms;
}

double carleman_block_norm(const QuadraticSystem& sys, int m, int k, double t) {
  if (t < 0) throw InvalidInput("block norm: need t >= 0");
  return carleman_block_norms(sys, m, k, {t})[0][k];
}

nlohmann::json to_json(const BlockVector& v) {
  nlohmann::json levels = nlohmann::json::array();
  for (int p = 1; p <= v.levels(); ++p) levels.push_back({{"level", p}, {"entries", to_json(v.block(p))}});
  return {{"N", v.base_dim()}, {"levels", levels}};
}

BlockVector block_vector_from_json(const nlohmann::json& j) {
  if (!j.contains("N") || !j.contains("levels")) throw InvalidInput("block vector JSON requires N and levels");
  const auto N = j.at("N").get<std::size_t>();
  const auto& levels = j.at("levels");
  BlockVector v(N, static_cast<int>(levels.size()));
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int p = levels[i].at("level").get<int>();
    if (p != static_cast<int>(i) + 1) throw InvalidInput("block vector JSON: levels must be consecutive from 1");
    const DenseVector entries = vector_from_json(levels[i].at("entries"));
    if (entries.size() != v.level_dim(p)) throw InvalidInput("block vector JSON: level has wrong length");
    std::copy(entries.begin(), entries.end(), v.block(p).begin());
  }
  return v;
}

}  // namespace carleman
