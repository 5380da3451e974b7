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

#include "carleman/dequant.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "carleman/evolve.hpp"
#include "carleman/schedule.hpp"

namespace carleman {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_T_eps(double T, double eps) {
  if (!(T > 0) || !std::isfinite(T)) throw InvalidInput("T must be positive");
  if (!(eps > 0 && eps < 1)) throw InvalidInput("eps must lie in (0, 1)");
}

// f(u) = A u + B (u (x) u), read row by row through the sparse oracles.
void oracle_rhs(const QuadraticSystem& sys, const DenseVector& u, DenseVector& out, OracleCounters& counters) {
  const std::size_t N = sys.dim();
  for (std::size_t i = 0; i < N; ++i) {
    Complex acc = 0.0;
    for (std::size_t j = 1; j <= sys.dA; ++j) {
      const auto [col, value] = oracle_A(sys, i, j, counters);
      acc += value * u[col];
    }
    for (std::size_t j = 1; j <= sys.dB; ++j) {
      const auto [col, value] = oracle_B(sys, i, j, counters);
      if (value != Complex{0.0}) acc += value * u[col / N] * u[col % N];
    }
    out[i] = acc;
  }
}

EulerResult euler_core(const QuadraticSystem& sys, DenseVector u, double T, double eps, const EulerOptions& options,
                       EulerResult result) {
  result.L = euler_lipschitz(sys);
  result.M = euler_derivative_bound(sys);
  result.h = options.h > 0 ? options.h : euler_step_size(sys, T, eps);
  const double steps = std::ceil(T / result.h - 1e-12);
  if (!std::isfinite(steps) || steps > static_cast<double>(options.limits.max_steps))
    throw CapacityError("euler: " + std::to_string(steps) + " steps exceed the cap of " +
                        std::to_string(options.limits.max_steps));
  result.steps = std::max<std::size_t>(1, static_cast<std::size_t>(steps));
  result.h_used = T / static_cast<double>(result.steps);
  result.bound = euler_error_bound(result.h, result.M, result.L, T);
  DenseVector f(u.size());
  for (std::size_t s = 0; s < result.steps; ++s) {
    oracle_rhs(sys, u, f, result.counters);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += result.h_used * f[i];
  }
  result.state = std::move(u);
  return result;
}

}  // namespace

double euler_lipschitz(const QuadraticSystem& sys) { return sys.normA + 2 * sys.normB; }

double euler_derivative_bound(const QuadraticSystem& sys) {
  return euler_lipschitz(sys) * std::max(1.0, sys.normA + sys.normB);
}

double euler_step_size(const QuadraticSystem& sys, double T, double eps) {
  check_T_eps(T, eps);
  const double L = euler_lipschitz(sys);
  if (L == 0) return T;
  return eps * std::exp(-L * T) * L / euler_derivative_bound(sys);
}

double euler_error_bound(double h, double M, double L, double T) {
  if (L == 0) return 0.0;
  return h * M * std::exp(L * T) / (2 * L);
}

std::size_t euler_initial_samples(const QuadraticSystem& sys, double T, double eps) {
  check_T_eps(T, eps);
  const double a = (eps / 2) * std::exp(-euler_lipschitz(sys) * T);
  const double C = std::max(2.0, static_cast<double>(sys.dim()) - 1.0);
  const double n = std::ceil(C / (a * a));
  if (!std::isfinite(n) || n > 1e15) throw CapacityError("euler: initial sample count is too large");
  return static_cast<std::size_t>(n);
}

EulerResult euler_solve(const QuadraticSystem& sys, SamplingOracle& oracle, double T, double eps,
                        const EulerOptions& options) {
  check_T_eps(T, eps);
  if (oracle.dim() != sys.dim()) throw InvalidInput("euler: oracle dimension does not match the system");
  EulerResult result;
  result.nsamples = options.nsamples > 0 ? options.nsamples : euler_initial_samples(sys, T, eps);
  if (result.nsamples > options.limits.max_steps * 64)
    throw CapacityError("euler: " + std::to_string(result.nsamples) + " initial samples exceed the cap");
  result.initial_estimate = estimate_initial_state(oracle, result.nsamples, result.counters);
  DenseVector start = result.initial_estimate;
  return euler_core(sys, std::move(start), T, eps, options, std::move(result));
}

EulerResult euler_solve_exact(const QuadraticSystem& sys, const DenseVector& u0, double T, double eps,
                              const EulerOptions& options) {
  check_T_eps(T, eps);
  if (u0.size() != sys.dim()) throw InvalidInput("euler: u0 has wrong dimension");
  EulerResult result;
  result.initial_estimate = u0;
  return euler_core(sys, u0, T, eps, options, std::move(result));
}

// ---- factor list ----

HermitianFactorList::HermitianFactorList(const QuadraticSystem& sys, int levels) : N_(sys.dim()), m_(levels) {
  if (levels < 1) throw InvalidInput("pimc_decompose: need at least one level");
  const std::size_t total = block_entries(N_, levels);
  (void)total;
  offsets_.assign(levels + 1, 0);
  for (int p = 1; p <= levels; ++p) offsets_[p] = offsets_[p - 1] + ipow(N_, p);
  weight_.resize(levels + 2);
  for (int i = 0; i <= levels + 1; ++i) weight_[i] = ipow(N_, i);

  // A = H2 - i H1 with H2 = (A + A^H)/2 and H1 = i(A - A^H)/2.
  const SparseMatrix AH = sys.A.adjoint();
  const SparseMatrix H2 = (sys.A + AH).scaled(0.5);
  const SparseMatrix H1 = (sys.A - AH).scaled(Complex{0.0, 0.5});
  const SparseMatrix* parts[2] = {&H2, &H1};
  for (int kind = 0; kind < 2; ++kind) {
    const SparseMatrix& H = *parts[kind];
    HermitianPiece diag{std::vector<std::size_t>(N_, npos), std::vector<Complex>(N_, 0.0)};
    bool has_diag = false;
    std::vector<std::vector<std::size_t>> vertex_colors(N_);
    std::vector<HermitianPiece> off;
    for (std::size_t x = 0; x < N_; ++x) {
      for (const auto& e : H.row(x)) {
        const std::size_t y = e.col;
        if (y == x) {
          diag.partner[x] = x;
          diag.value[x] = e.value;
          has_diag = true;
          continue;
        }
        if (y < x) continue;
        std::size_t color = 0;
        auto used = [&](std::size_t v) {
          return std::find(vertex_colors[v].begin(), vertex_colors[v].end(), color) != vertex_colors[v].end();
        };
        while (used(x) || used(y)) ++color;
        vertex_colors[x].push_back(color);
        vertex_colors[y].push_back(color);
        if (color >= off.size())
          off.push_back({std::vector<std::size_t>(N_, npos), std::vector<Complex>(N_, 0.0)});
        // Column y holds H[x, y]; column x holds H[y, x] = conj(H[x, y]).
        off[color].partner[y] = x;
        off[color].value[y] = e.value;
        off[color].partner[x] = y;
        off[color].value[x] = std::conj(e.value);
      }
    }
    if (has_diag) h_pieces_[kind].push_back(std::move(diag));
    for (auto& piece : off) h_pieces_[kind].push_back(std::move(piece));
  }

  const std::size_t NN = N_ * N_;
  for (const auto& piece : one_sparse_pieces(sys.B)) {
    InjectionPiece inj{std::vector<std::size_t>(N_, npos), std::vector<Complex>(N_, 0.0),
                       std::vector<std::size_t>(NN, npos), std::vector<Complex>(NN, 0.0)};
    for (const auto& t : piece.triplets()) {
      inj.fwd_col[t.row] = t.col;
      inj.fwd_val[t.row] = t.value;
      inj.inv_row[t.col] = t.row;
      inj.inv_val[t.col] = t.value;
    }
    b_pieces_.push_back(std::move(inj));
  }

  for (int kind = 0; kind < 2; ++kind)
    for (int q = 0; q < m_; ++q)
      for (std::size_t c = 0; c < h_pieces_[kind].size(); ++c)
        factors_.push_back({kind == 0 ? FactorKind::AHermitianPart : FactorKind::AAntiHermitianPart, q,
                            static_cast<int>(c), 0, kind == 0 ? Complex{1.0} : Complex{0.0, -1.0}});
  // B couples (p, p+1) for p = 1..m-1; pairs of equal parity are disjoint.
  for (int parity = 1; parity >= 0; --parity) {
    int top = 0;
    for (int p = 1; p < m_; ++p)
      if (p % 2 == parity) top = p;
    for (int q = 0; q < top; ++q)
      for (std::size_t c = 0; c < b_pieces_.size(); ++c) {
        factors_.push_back({FactorKind::BPlus, q, static_cast<int>(c), parity, Complex{0.5}});
        factors_.push_back({FactorKind::BMinus, q, static_cast<int>(c), parity, Complex{0.0, -0.5}});
      }
  }
}

int HermitianFactorList::level_of(std::size_t index) const {
  if (index >= dim()) throw InvalidInput("factor list: index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<int>(std::distance(offsets_.begin(), it));
}

ColumnEntries HermitianFactorList::generator_column(std::size_t f, std::size_t col) const {
  ColumnEntries out;
  const HermitianFactor& F = factors_.at(f);
  const int p = level_of(col);
  const std::size_t r = col - offsets_[p - 1];
  const int q = F.position;
  if (F.kind == FactorKind::AHermitianPart || F.kind == FactorKind::AAntiHermitianPart) {
    if (p <= q) return out;
    const auto& piece = h_pieces_[F.kind == FactorKind::AHermitianPart ? 0 : 1][F.color];
    const std::size_t w = weight_[p - q - 1];
    const std::size_t y = (r / w) % N_;
    const std::size_t x = piece.partner[y];
    if (x == npos) return out;
    out.count = 1;
    out.row[0] = offsets_[p - 1] + r - y * w + x * w;
    out.value[0] = piece.value[y];
    return out;
  }
  const auto& piece = b_pieces_[F.color];
  const Complex scale = F.kind == FactorKind::BPlus ? Complex{1.0} : Complex{0.0, 1.0};
  if (p % 2 == F.parity) {
    // Column at the lower level p of the pair (p, p+1): the X^H block.
    if (p + 1 > m_ || q >= p) return out;
    const std::size_t w = weight_[p - q - 1];
    const std::size_t x = (r / w) % N_;
    const std::size_t c = piece.fwd_col[x];
    if (c == npos) return out;
    out.count = 1;
    out.row[0] = offsets_[p] + ((r / (w * N_)) * N_ * N_ + c) * w + r % w;
    out.value[0] = std::conj(scale) * std::conj(piece.fwd_val[x]);
    return out;
  }
  // Column at the upper level p of the pair (p-1, p): the X block.
  if (p < 2 || q > p - 2) return out;
  const std::size_t w = weight_[p - q - 2];
  const std::size_t c = (r / w) % (N_ * N_);
  const std::size_t x = piece.inv_row[c];
  if (x == npos) return out;
  out.count = 1;
  out.row[0] = offsets_[p - 2] + ((r / (w * N_ * N_)) * N_ + x) * w + r % w;
  out.value[0] = scale * piece.inv_val[c];
  return out;
}

ColumnEntries HermitianFactorList::exp_column(std::size_t f, std::size_t col, double s) const {
  const ColumnEntries g = generator_column(f, col);
  ColumnEntries out;
  const Complex a = s * factors_[f].theta;
  if (g.count == 0) {
    out.count = 1;
    out.row[0] = col;
    out.value[0] = 1.0;
  } else if (g.row[0] == col) {
    out.count = 1;
    out.row[0] = col;
    out.value[0] = std::exp(a * g.value[0]);
  } else {
    // 2x2 block [[0, conj z], [z, 0]] has square |z|^2 I.
    const double mag = std::abs(g.value[0]);
    const Complex w = a * mag;
    out.count = 2;
    out.row[0] = col;
    out.value[0] = std::cosh(w);
    out.row[1] = g.row[0];
    out.value[1] = std::sinh(w) / mag * g.value[0];
  }
  return out;
}

SparseMatrix HermitianFactorList::factor_matrix(std::size_t f) const {
  std::vector<Triplet> t;
  for (std::size_t col = 0; col < dim(); ++col) {
    const ColumnEntries g = generator_column(f, col);
    for (std::size_t i = 0; i < g.count; ++i) t.push_back({g.row[i], col, g.value[i]});
  }
  return {dim(), dim(), std::move(t)};
}

std::vector<std::vector<std::size_t>> HermitianFactorList::parity_classes() const {
  std::vector<std::vector<std::size_t>> classes(2);
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const auto kind = factors_[f].kind;
    if (kind == FactorKind::BPlus || kind == FactorKind::BMinus) classes[factors_[f].parity].push_back(f);
  }
  return classes;
}

HermitianFactorList pimc_decompose(const QuadraticSystem& sys, int levels) { return {sys, levels}; }

int trotter_steps(double T, double eps) {
  check_T_eps(T, eps);
  return static_cast<int>(std::ceil(T / eps - 1e-12));
}

DenseVector trotter_apply(const HermitianFactorList& factors, int r, double t, const DenseVector& v) {
  if (v.size() != factors.dim()) throw InvalidInput("trotter_apply: dimension mismatch");
  if (r < 1) throw InvalidInput("trotter_apply: r must be at least 1");
  const double s = t / r;
  DenseVector cur = v, next(v.size());
  for (int step = 0; step < r; ++step) {
    for (std::size_t f = 0; f < factors.factors().size(); ++f) {
      std::fill(next.begin(), next.end(), Complex{0.0});
      for (std::size_t col = 0; col < cur.size(); ++col) {
        if (cur[col] == Complex{0.0}) continue;
        const ColumnEntries e = factors.exp_column(f, col, s);
        for (std::size_t i = 0; i < e.count; ++i) next[e.row[i]] += e.value[i] * cur[col];
      }
      std::swap(cur, next);
    }
  }
  return cur;
}

PathSample pimc_sample_path(const HermitianFactorList& factors, int r, double t, std::size_t start, CounterRng& rng,
                            bool importance) {
  if (r < 1) throw InvalidInput("pimc_sample_path: r must be at least 1");
  const double s = t / r;
  PathSample path;
  path.start = start;
  std::size_t col = start;
  for (int step = 0; step < r; ++step) {
    for (std::size_t f = 0; f < factors.factors().size(); ++f) {
      const ColumnEntries e = factors.exp_column(f, col, s);
      std::size_t b = 0;
      if (e.count == 2) {
        const double u = rng.uniform();
        if (importance) {
          const double m0 = std::abs(e.value[0]), m1 = std::abs(e.value[1]);
          const double p0 = m0 / (m0 + m1);
          b = u < p0 ? 0 : 1;
          path.multiplicity /= b == 0 ? p0 : 1.0 - p0;
        } else {
          b = u < 0.5 ? 0 : 1;
          path.multiplicity *= 2.0;
        }
        path.branches.push_back(static_cast<std::uint8_t>(b));
      }
      path.weight *= e.value[b];
      col = e.row[b];
    }
  }
  path.end = col;
  return path;
}

DenseVector pimc_enumerate(const HermitianFactorList& factors, int r, double t, std::size_t start,
                           std::size_t* path_count, std::size_t max_paths) {
  if (r < 1) throw InvalidInput("pimc_enumerate: r must be at least 1");
  if (start >= factors.dim()) throw InvalidInput("pimc_enumerate: start out of range");
  const double s = t / r;
  const std::size_t F = factors.factors().size();
  const std::size_t depth = static_cast<std::size_t>(r) * F;
  DenseVector out(factors.dim(), 0.0);
  std::size_t count = 0;
  std::function<void(std::size_t, std::size_t, Complex)> walk = [&](std::size_t level, std::size_t col, Complex w) {
    if (level == depth) {
      out[col] += w;
      if (++count > max_paths) throw CapacityError("pimc_enumerate: more than " + std::to_string(max_paths) + " paths");
      return;
    }
    const ColumnEntries e = factors.exp_column(level % F, col, s);
    for (std::size_t i = 0; i < e.count; ++i) walk(level + 1, e.row[i], w * e.value[i]);
  };
  walk(0, start, 1.0);
  if (path_count) *path_count = count;
  return out;
}

int pimc_levels(const QuadraticSystem& sys, double T, double eps) {
  check_T_eps(T, eps);
  for (int m = 1; m < 64; ++m) {
    double tail = 0.0;
    for (int k = m; k < m + 200; ++k) tail += truncation_bound(1, k, T, sys.normA, sys.normB);
    if (tail <= eps / 2) return m;
  }
  throw CapacityError("pimc: no truncation level below 64 meets the error budget");
}

namespace {

Complex lookup(const SparseMatrix& U, std::size_t i, std::size_t j) {
  const auto row = U.row(i);
  const auto it = std::lower_bound(row.begin(), row.end(), j,
                                   [](const SparseMatrix::Entry& e, std::size_t c) { return e.col < c; });
  return it != row.end() && it->col == j ? it->value : Complex{0.0};
}

struct HalfSample {
  bool top = false;
  std::size_t end = 0;
  Complex value;
  std::uint64_t draws = 0;
};

HalfSample sample_half(const HermitianFactorList& factors, const SamplingOracle& oracle, int r, double t,
                       CounterRng& rng, bool importance) {
  HalfSample h;
  const int m = factors.levels();
  const std::size_t N = factors.base_dim();
  const int p = 1 + std::min(m - 1, static_cast<int>(rng.uniform() * m));
  std::size_t index = 0;
  Complex amp = static_cast<double>(m);
  for (int q = 0; q < p; ++q) {
    const auto d = oracle.draw_from_unit(rng.uniform());
    ++h.draws;
    index = index * N + d.index;
    amp *= std::polar(1.0 / oracle.amplitudes()[d.index], d.phase);
  }
  const PathSample path = pimc_sample_path(factors, r, t, factors.offset(p) + index, rng, importance);
  if (path.end < factors.offset(1) + N) {
    h.top = true;
    h.end = path.end;
    h.value = amp * path.weight * path.multiplicity;
  }
  return h;
}

}  // namespace

PimcEstimate pimc_estimate(const QuadraticSystem& sys, const SamplingOracle& oracle, const UnitaryObservable& U,
                           double T, double eps, double confidence, const PimcOptions& options) {
  check_T_eps(T, eps);
  if (!(confidence > 0 && confidence < 1)) throw InvalidInput("pimc: confidence must lie in (0, 1)");
  if (oracle.dim() != sys.dim() || U.U.rows() != sys.dim()) throw InvalidInput("pimc: dimension mismatch");
  if (options.pilot < 2) throw InvalidInput("pimc: pilot must be at least 2");
  PimcEstimate est;
  est.eps = eps;
  est.confidence = confidence;
  est.levels = options.levels > 0 ? options.levels : pimc_levels(sys, T, eps);
  est.r = options.r > 0 ? options.r : trotter_steps(T, eps);
  const HermitianFactorList factors(sys, est.levels);
  est.factor_count = factors.factors().size();

  std::vector<Complex> values;
  std::vector<std::uint64_t> draws;
  auto run = [&](std::size_t begin, std::size_t end) {
    values.resize(end);
    draws.resize(end);
    const auto b = static_cast<std::ptrdiff_t>(begin), e = static_cast<std::ptrdiff_t>(end);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = b; i < e; ++i) {
      CounterRng rng(oracle.seed(), static_cast<std::uint64_t>(i));
      const HalfSample x = sample_half(factors, oracle, est.r, T, rng, options.importance);
      const HalfSample y = sample_half(factors, oracle, est.r, T, rng, options.importance);
      values[i] = x.top && y.top ? std::conj(x.value) * lookup(U.U, x.end, y.end) * y.value : Complex{0.0};
      draws[i] = x.draws + y.draws;
    }
  };
  auto variance = [&](std::size_t n, Complex& mean) {
    Complex sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += values[i];
    mean = sum / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::norm(values[i] - mean);
    return acc / static_cast<double>(n - 1);
  };

  run(0, options.pilot);
  Complex mean;
  est.pilot = options.pilot;
  est.pilot_variance = variance(options.pilot, mean);
  if (!std::isfinite(est.pilot_variance)) throw InstabilityError("pimc: pilot variance is not finite");
  const double needed = std::ceil(est.pilot_variance / (eps * eps * (1 - confidence)));
  if (needed > static_cast<double>(options.limits.max_steps) * 4)
    throw CapacityError("pimc: " + std::to_string(needed) + " samples exceed the cap");
  est.nsamples = std::max(options.pilot, static_cast<std::size_t>(needed));
  if (est.nsamples > options.pilot) run(options.pilot, est.nsamples);
  est.variance = variance(est.nsamples, mean);
  est.value = mean;
  for (std::size_t i = 0; i < est.nsamples; ++i) est.counters.queries_u += draws[i];
  return est;
}

Complex pimc_exact(const QuadraticSystem& sys, const DenseVector& u0, const UnitaryObservable& U, double T, int levels,
                   int r, bool enumerate) {
  if (u0.size() != sys.dim() || U.U.rows() != sys.dim()) throw InvalidInput("pimc_exact: dimension mismatch");
  const HermitianFactorList factors(sys, levels);
  const BlockVector lifted = lift_state(u0, levels);
  const DenseVector start(lifted.data().begin(), lifted.data().end());
  DenseVector v(factors.dim(), 0.0);
  if (enumerate) {
    for (std::size_t c = 0; c < start.size(); ++c) {
      if (start[c] == Complex{0.0}) continue;
      const DenseVector col = pimc_enumerate(factors, r, T, c);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] += start[c] * col[i];
    }
  } else {
    v = trotter_apply(factors, r, T, start);
  }
  const DenseVector top(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(sys.dim()));
  return inner(top, U.U * top);
}

}  // namespace carleman
