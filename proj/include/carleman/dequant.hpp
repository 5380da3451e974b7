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

#include <cstdint>
#include <vector>

#include "carleman/carleman.hpp"
#include "carleman/rng.hpp"

namespace carleman {

// ---- Sampling-oracle Euler solver ----

struct EulerOptions {
  double h = 0.0;             // 0 selects the step from the error budget
  std::size_t nsamples = 0;   // 0 selects the count from the error budget
  Limits limits = Limits::from_env();
};

struct EulerResult {
  DenseVector state;
  DenseVector initial_estimate;
  double h = 0.0;      // nominal step
  double h_used = 0.0; // T / steps <= h
  std::size_t steps = 0;
  std::size_t nsamples = 0;
  double L = 0.0;
  double M = 0.0;
  double bound = 0.0;  // h M e^{L T} / (2 L)
  OracleCounters counters;
};

/// ||A|| + 2||B||.
double euler_lipschitz(const QuadraticSystem& sys);
/// (||A|| + 2||B||) max(1, ||A|| + ||B||).
double euler_derivative_bound(const QuadraticSystem& sys);
/// eps e^{-L T} L / M, so that h M e^{L T} / (2L) = eps / 2.
double euler_step_size(const QuadraticSystem& sys, double T, double eps);
double euler_error_bound(double h, double M, double L, double T);
/// ceil(C / a^2), a = (eps/2) e^{-L T}, C = max(2, N - 1).
std::size_t euler_initial_samples(const QuadraticSystem& sys, double T, double eps);

EulerResult euler_solve(const QuadraticSystem& sys, SamplingOracle& oracle, double T, double eps,
                        const EulerOptions& options = {});
/// Exact-input mode: starts from u0 without touching the sampling oracle.
EulerResult euler_solve_exact(const QuadraticSystem& sys, const DenseVector& u0, double T, double eps,
                              const EulerOptions& options = {});

// ---- Path-integral Monte Carlo ----

enum class FactorKind { AHermitianPart, AAntiHermitianPart, BPlus, BMinus };

/// One 1-sparse Hermitian factor theta * H on the flattened levels 1..m.
/// A factors act at tensor position q on every level p > q. B factors couple
/// levels (p, p+1) at position q for every p with p % 2 == parity.
struct HermitianFactor {
  FactorKind kind = FactorKind::AHermitianPart;
  int position = 0;
  int color = 0;
  int parity = 0;
  Complex theta = 1.0;
};

struct ColumnEntries {
  std::size_t count = 0;
  std::size_t row[2] = {0, 0};
  Complex value[2];
};

class HermitianFactorList {
 public:
  HermitianFactorList(const QuadraticSystem& sys, int levels);

  std::size_t base_dim() const { return N_; }
  int levels() const { return m_; }
  std::size_t dim() const { return offsets_.back(); }
  std::size_t offset(int p) const { return offsets_[p - 1]; }
  int level_of(std::size_t index) const;
  const std::vector<HermitianFactor>& factors() const { return factors_; }

  /// Nonzeros of column `col` of H_f (not scaled by theta).
  ColumnEntries generator_column(std::size_t f, std::size_t col) const;
  /// Nonzeros of column `col` of e^{s theta_f H_f}.
  ColumnEntries exp_column(std::size_t f, std::size_t col, double s) const;
  /// H_f as a sparse matrix on the flattened space (test and export use).
  SparseMatrix factor_matrix(std::size_t f) const;
  /// Even/odd classes: factor indices whose levels do not overlap.
  std::vector<std::vector<std::size_t>> parity_classes() const;

 private:
  struct HermitianPiece {
    std::vector<std::size_t> partner;  // partner[y] = x with H[x, y] != 0, or npos
    std::vector<Complex> value;        // H[partner[y], y]
  };
  struct InjectionPiece {
    std::vector<std::size_t> fwd_col;  // row x -> column c of B, or npos
    std::vector<Complex> fwd_val;
    std::vector<std::size_t> inv_row;  // column c -> row x, or npos
    std::vector<Complex> inv_val;
  };

  std::size_t N_;
  int m_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> weight_;  // N^i
  std::vector<HermitianPiece> h_pieces_[2];  // [0] = (A + A^H)/2, [1] = i(A - A^H)/2
  std::vector<InjectionPiece> b_pieces_;
  std::vector<HermitianFactor> factors_;
};

HermitianFactorList pimc_decompose(const QuadraticSystem& sys, int levels);

/// ceil(T / eps).
int trotter_steps(double T, double eps);

/// (prod_f e^{(t/r) theta_f H_f})^r v, factor 0 applied first.
DenseVector trotter_apply(const HermitianFactorList& factors, int r, double t, const DenseVector& v);

struct PathSample {
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<std::uint8_t> branches;  // one entry per two-way factor
  Complex weight = 1.0;                // product of traversed entries
  double multiplicity = 1.0;           // inverse probability of the branch choices
};

/// Walks the product from `start`. Uniform branching by default; with
/// importance, branches are chosen with probability proportional to |entry|.
PathSample pimc_sample_path(const HermitianFactorList& factors, int r, double t, std::size_t start, CounterRng& rng,
                            bool importance = false);

/// Sum over every path from `start`; equals the Trotter product column.
DenseVector pimc_enumerate(const HermitianFactorList& factors, int r, double t, std::size_t start,
                           std::size_t* path_count = nullptr, std::size_t max_paths = std::size_t{1} << 24);

struct PimcOptions {
  int levels = 0;  // 0 selects from the truncation bound
  int r = 0;       // 0 selects trotter_steps(T, eps)
  bool importance = false;
  std::size_t pilot = 1000;
  Limits limits = Limits::from_env();
};

struct PimcEstimate {
  Complex value;
  std::size_t nsamples = 0;
  std::size_t pilot = 0;
  double pilot_variance = 0.0;
  double variance = 0.0;
  double eps = 0.0;
  double confidence = 0.0;
  int levels = 0;
  int r = 0;
  std::size_t factor_count = 0;
  OracleCounters counters;
};

/// Smallest m whose dropped tail truncation_bound(1, m, T) is at most eps / 2.
int pimc_levels(const QuadraticSystem& sys, double T, double eps);

PimcEstimate pimc_estimate(const QuadraticSystem& sys, const SamplingOracle& oracle, const UnitaryObservable& U,
                           double T, double eps, double confidence, const PimcOptions& options = {});

/// <v_1|U|v_1> for v the Trotter product applied to the lifted u0, either by
/// direct application or by summing every path.
Complex pimc_exact(const QuadraticSystem& sys, const DenseVector& u0, const UnitaryObservable& U, double T, int levels,
                   int r, bool enumerate = false);

}  // namespace carleman
