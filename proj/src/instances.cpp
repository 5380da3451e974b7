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

#include "carleman/instances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "carleman/rng.hpp"

namespace carleman {

namespace {

double gaussian(CounterRng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
}

SparseMatrix normalized(const SparseMatrix& M, double target) {
  if (M.empty()) return M;
  return M.scaled(target / spectral_norm(M));
}

// Real antisymmetric N x N matrix.
SparseMatrix random_antisymmetric(std::size_t N, CounterRng& rng) {
  std::vector<Triplet> t;
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t y = x + 1; y < N; ++y) {
      const double v = gaussian(rng);
      t.push_back({x, y, v});
      t.push_back({y, x, -v});
    }
  return {N, N, std::move(t)};
}

// Swaps the two entries of every pair (2p, 2p+1); the identity when N = 1.
SparseMatrix pair_swap(std::size_t N) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i + 1 < N; i += 2) {
    t.push_back({i, i + 1, 1.0});
    t.push_back({i + 1, i, 1.0});
  }
  if (N % 2 == 1) t.push_back({N - 1, N - 1, 1.0});
  return {N, N, std::move(t)};
}

}  // namespace

const std::vector<std::string>& instance_kinds() {
  static const std::vector<std::string> kinds = {"linear-hermitian", "gp-toy", "random-unitary-flow",
                                                 "one-sparse-diagonal"};
  return kinds;
}

DenseVector random_unit_vector(std::size_t n, std::uint64_t seed, std::uint64_t stream, bool real) {
  CounterRng rng(seed, stream);
  DenseVector v(n);
  for (auto& z : v) z = real ? Complex{gaussian(rng), 0.0} : Complex{gaussian(rng), gaussian(rng)};
  const double nrm = norm(v);
  for (auto& z : v) z /= nrm;
  return v;
}

SparseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint64_t stream,
                           double density, bool real) {
  CounterRng rng(seed, stream);
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (density < 1.0 && rng.uniform() >= density) continue;
      const Complex v = real ? Complex{gaussian(rng), 0.0} : Complex{gaussian(rng), gaussian(rng)};
      t.push_back({r, c, v});
    }
  return {rows, cols, std::move(t)};
}

double max_norm_rate(const QuadraticSystem& sys, int samples, std::uint64_t seed, bool real_states) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const DenseVector u = random_unit_vector(sys.dim(), seed, 1000 + static_cast<std::uint64_t>(s), real_states);
    worst = std::max(worst, std::abs(2.0 * inner(u, sys.rhs(u)).real()));
  }
  return worst;
}

Instance gen_instance(const std::string& kind, int n, std::uint64_t seed, double g) {
  if (n < 0 || n > 12) throw InvalidInput("gen-instance: n must lie in [0, 12]");
  if (!(g >= 0) || !std::isfinite(g)) throw InvalidInput("gen-instance: g must be non-negative");
  const std::size_t N = std::size_t{1} << n;
  if (static_cast<double>(N) * N * N > static_cast<double>(default_max_entries()))
    throw CapacityError("gen-instance: N^3 exceeds the entry cap");
  CounterRng rng(seed, 1);
  Instance inst;
  inst.kind = kind;
  bool real = true;
  bool check_norm = true;
  SparseMatrix A, B = SparseMatrix::zero(N, N * N);
  SparseMatrix U = pair_swap(N);

  if (kind == "linear-hermitian") {
    const SparseMatrix X = random_matrix(N, N, seed, 2);
    const SparseMatrix H = normalized((X + X.adjoint()).scaled(0.5), 1.0);
    A = H.scaled(Complex{0.0, -1.0});
    real = false;
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < N; ++i)
      t.push_back({i, (i + 1) % N, std::polar(1.0, 2 * std::numbers::pi * rng.uniform())});
    U = SparseMatrix(N, N, std::move(t));
  } else if (kind == "gp-toy") {
    if (N < 2) throw InvalidInput("gen-instance: gp-toy needs n >= 1");
    // Real encoding of N/2 complex modes (a_p, b_p) = (u_{2p}, u_{2p+1}):
    // each pair rotates at rate h_p + l(u), l(u) = sum_z lambda_z u_z.
    std::vector<Triplet> ta;
    for (std::size_t p = 0; p < N / 2; ++p) {
      const double h = N == 2 ? 1.0 : 0.5 + rng.uniform();
      ta.push_back({2 * p, 2 * p + 1, h});
      ta.push_back({2 * p + 1, 2 * p, -h});
    }
    SparseMatrix rot(N, N, std::move(ta));
    if (N > 2) rot = rot + random_antisymmetric(N, rng).scaled(0.1);
    A = normalized(rot, 1.0);
    std::vector<double> lambda(N);
    for (auto& l : lambda) l = gaussian(rng);
    std::vector<Triplet> tb;
    for (std::size_t p = 0; p < N / 2; ++p)
      for (std::size_t z = 0; z < N; ++z) {
        tb.push_back({2 * p, z * N + 2 * p + 1, lambda[z]});
        tb.push_back({2 * p + 1, z * N + 2 * p, -lambda[z]});
      }
    B = normalized(SparseMatrix(N, N * N, std::move(tb)), g);
  } else if (kind == "random-unitary-flow") {
    A = normalized(random_antisymmetric(N, rng), 1.0);
    std::vector<Triplet> tb;
    for (std::size_t z = 0; z < N; ++z) {
      const SparseMatrix omega = random_antisymmetric(N, rng);
      for (const auto& e : omega.triplets()) tb.push_back({e.row, e.col * N + z, e.value});
    }
    B = normalized(SparseMatrix(N, N * N, std::move(tb)), g);
  } else if (kind == "one-sparse-diagonal") {
    std::vector<Triplet> ta, tb, tu;
    for (std::size_t x = 0; x < N; ++x) {
      ta.push_back({x, x, Complex{0.0, -(2 * rng.uniform() - 1)}});
      tb.push_back({x, x * N + x, Complex{0.0, -(2 * rng.uniform() - 1)}});
      tu.push_back({x, x, std::polar(1.0, 2 * std::numbers::pi * rng.uniform())});
    }
    A = SparseMatrix(N, N, std::move(ta));
    B = normalized(SparseMatrix(N, N * N, std::move(tb)), g);
    U = SparseMatrix(N, N, std::move(tu));
    real = false;
    check_norm = false;
  } else {
    throw InvalidInput("gen-instance: unknown kind '" + kind + "'");
  }

  inst.sys = QuadraticSystem::make(std::move(A), std::move(B));
  inst.u0 = random_unit_vector(N, seed, 3, real);
  inst.U = UnitaryObservable::make(std::move(U));
  if (check_norm) {
    const double rate = max_norm_rate(inst.sys, 100, seed, real);
    if (rate > 1e-12) throw InstabilityError("gen-instance: generated flow is not norm preserving (rate " +
                                             std::to_string(rate) + ")");
  }
  return inst;
}

}  // namespace carleman
