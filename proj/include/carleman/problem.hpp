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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carleman/linalg.hpp"

namespace carleman {

/// du/dt = F_1 u + F_2 u^{(x)2} + ... + F_k u^{(x)k}, F_j of shape D x D^j.
struct PolynomialSystem {
  std::size_t D = 0;
  std::vector<SparseMatrix> F;  // F[0] is F_1

  int order() const { return static_cast<int>(F.size()); }
  void validate() const;
  DenseVector rhs(const DenseVector& u) const;
};

/// du/dt = A u + B (u (x) u).
struct QuadraticSystem {
  SparseMatrix A;
  SparseMatrix B;
  double normA = 0.0;
  double normB = 0.0;
  std::size_t dA = 0;
  std::size_t dB = 0;
  int n = 0;  // ceil(log2 N)

  /// Validates shapes and caches norms and sparsities.
  static QuadraticSystem make(SparseMatrix A, SparseMatrix B);

  std::size_t dim() const { return A.rows(); }
  DenseVector rhs(const DenseVector& u) const;
  void rhs(std::span<const Complex> u, std::span<Complex> out) const;
};

struct OracleCounters {
  std::uint64_t queries_A = 0;
  std::uint64_t queries_B = 0;
  std::uint64_t queries_u = 0;

  std::uint64_t total() const { return queries_A + queries_B + queries_u; }
  OracleCounters& operator+=(const OracleCounters& o) {
    queries_A += o.queries_A;
    queries_B += o.queries_B;
    queries_u += o.queries_u;
    return *this;
  }
  bool operator==(const OracleCounters&) const = default;
};

nlohmann::json to_json(const OracleCounters& c);

/// Classical input oracle: returns (j, k_j) with probability c_j^2, where
/// u_j = c_j e^{i k_j}.
class SamplingOracle {
 public:
  struct Draw {
    std::size_t index = 0;
    double phase = 0.0;
  };

  SamplingOracle(const DenseVector& u, std::uint64_t seed);

  /// Next draw from the oracle's own counter; increments queries_u.
  Draw sample(OracleCounters& counters);
  /// Pure draw at an explicit (stream, index) position. Does not count.
  Draw draw_at(std::uint64_t stream, std::uint64_t index) const;
  Draw draw_from_unit(double r) const;

  std::size_t dim() const { return amplitudes_.size(); }
  const std::vector<double>& amplitudes() const { return amplitudes_; }
  const std::vector<double>& phases() const { return phases_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

 private:
  std::vector<double> amplitudes_;
  std::vector<double> phases_;
  std::vector<double> cumulative_;
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

struct UnitaryObservable {
  SparseMatrix U;

  static UnitaryObservable make(SparseMatrix U);
};

struct ReductionBounds {
  double normA_bound = 0.0;          // sum_j (k - j) ||F_j|| over j < k
  double normA_bound_literal = 0.0;  // max_i (k - i) sum_{j <= i} ||F_j||
  double normB_bound = 0.0;          // (k - 1) sum_{j >= 2} ||F_j||
};

struct SparsityBounds {
  std::size_t dA = 0;
  std::size_t dB = 0;
};

/// Lifts to u~ = (u, u^{(x)2}, ..., u^{(x)(k-1)}) and returns the quadratic
/// system satisfied by u~. Throws InstabilityError if a norm bound fails.
QuadraticSystem reduce_to_quadratic(const PolynomialSystem& P, std::size_t max_dim = default_max_entries());
ReductionBounds reduction_norm_bounds(const PolynomialSystem& P);
SparsityBounds sparsity_bounds(const PolynomialSystem& P);
/// u~ for a state of the polynomial system.
DenseVector lift_polynomial_state(const DenseVector& u, int order);

DenseVector estimate_initial_state(SamplingOracle& o, std::size_t nsamples, OracleCounters& counters);

/// j-th nonzero (1-based) of row i. Rows with fewer nonzeros return (i, 0)
/// without counting.
std::pair<std::size_t, Complex> oracle_A(const QuadraticSystem& sys, std::size_t i, std::size_t j,
                                         OracleCounters& counters);
std::pair<std::size_t, Complex> oracle_B(const QuadraticSystem& sys, std::size_t i, std::size_t j,
                                         OracleCounters& counters);

struct Instance {
  std::string kind;
  QuadraticSystem sys;
  DenseVector u0;
  std::optional<UnitaryObservable> U;
};

nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

int ceil_log2(std::size_t n);

}  // namespace carleman
