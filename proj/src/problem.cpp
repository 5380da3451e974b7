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

#include "carleman/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "carleman/rng.hpp"

namespace carleman {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

double checked_pow(std::size_t base, int e) { return std::pow(static_cast<double>(base), e); }

}  // namespace

int ceil_log2(std::size_t n) {
  int k = 0;
  while ((std::size_t{1} << k) < n) ++k;
  return k;
}

void PolynomialSystem::validate() const {
  if (D == 0) throw InvalidInput("polynomial system: D must be positive");
  if (F.size() < 2) throw InvalidInput("polynomial system: order must be at least 2");
  for (std::size_t j = 0; j < F.size(); ++j) {
    const double cols = checked_pow(D, static_cast<int>(j + 1));
    if (F[j].rows() != D || static_cast<double>(F[j].cols()) != cols)
      throw InvalidInput("polynomial system: F_" + std::to_string(j + 1) + " has wrong shape");
  }
}

DenseVector PolynomialSystem::rhs(const DenseVector& u) const {
  DenseVector out(D, 0.0), power = u, tmp(D);
  for (std::size_t j = 0; j < F.size(); ++j) {
    if (j > 0) power = kron(power, u);
    F[j].multiply(power, tmp);
    for (std::size_t i = 0; i < D; ++i) out[i] += tmp[i];
  }
  return out;
}

QuadraticSystem QuadraticSystem::make(SparseMatrix A, SparseMatrix B) {
  const std::size_t N = A.rows();
  if (N == 0 || A.cols() != N) throw InvalidInput("quadratic system: A must be square and nonempty");
  if (B.rows() != N || B.cols() != N * N) throw InvalidInput("quadratic system: B must have shape N x N^2");
  QuadraticSystem s;
  s.normA = A.empty() ? 0.0 : spectral_norm(A);
  s.normB = B.empty() ? 0.0 : spectral_norm(B);
  s.dA = A.sparsity();
  s.dB = B.sparsity();
  s.n = ceil_log2(N);
  s.A = std::move(A);
  s.B = std::move(B);
  return s;
}

void QuadraticSystem::rhs(std::span<const Complex> u, std::span<Complex> out) const {
  const std::size_t N = dim();
  if (u.size() != N || out.size() != N) throw InvalidInput("rhs: dimension mismatch");
  for (std::size_t x = 0; x < N; ++x) {
    Complex acc = 0.0;
    for (const auto& e : A.row(x)) acc += e.value * u[e.col];
    for (const auto& e : B.row(x)) acc += e.value * u[e.col / N] * u[e.col % N];
    out[x] = acc;
  }
}

DenseVector QuadraticSystem::rhs(const DenseVector& u) const {
  DenseVector out(dim());
  rhs(u, out);
  return out;
}

nlohmann::json to_json(const OracleCounters& c) {
  return {{"queries_A", c.queries_A}, {"queries_B", c.queries_B}, {"queries_u", c.queries_u}};
}

SamplingOracle::SamplingOracle(const DenseVector& u, std::uint64_t seed) : seed_(seed) {
  if (u.empty()) throw InvalidInput("sampling oracle: empty state");
  const double nrm = norm(u);
  if (std::abs(nrm - 1.0) > 1e-10) throw InvalidInput("sampling oracle: state must have unit norm");
  amplitudes_.reserve(u.size());
  phases_.reserve(u.size());
  cumulative_.reserve(u.size());
  double acc = 0.0;
  for (const auto& z : u) {
    const double c = std::abs(z);
    double k = c > 0 ? std::arg(z) : 0.0;
    if (k < 0) k += 2 * std::numbers::pi;
    amplitudes_.push_back(c);
    phases_.push_back(k);
    acc += c * c;
    cumulative_.push_back(acc);
  }
}

SamplingOracle::Draw SamplingOracle::draw_from_unit(double r) const {
  const double target = r * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t j = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
  if (j >= cumulative_.size()) j = cumulative_.size() - 1;
  // Never return an index of zero probability.
  while (amplitudes_[j] == 0.0 && j > 0) --j;
  while (amplitudes_[j] == 0.0) ++j;
  return {j, phases_[j]};
}

SamplingOracle::Draw SamplingOracle::draw_at(std::uint64_t stream, std::uint64_t index) const {
  return draw_from_unit(to_unit(hash_counter(seed_, stream, index)));
}

SamplingOracle::Draw SamplingOracle::sample(OracleCounters& counters) {
  ++counters.queries_u;
  return draw_at(0, counter_++);
}

UnitaryObservable UnitaryObservable::make(SparseMatrix U) {
  if (U.rows() != U.cols()) throw InvalidInput("observable: U must be square");
  const SparseMatrix defect = U.adjoint() * U - SparseMatrix::identity(U.rows());
  if (!defect.empty() && defect.norm_upper_bound() > 1e-8 && spectral_norm(defect) > 1e-8)
    throw InvalidInput("observable: U is not unitary");
  return {std::move(U)};
}

ReductionBounds reduction_norm_bounds(const PolynomialSystem& P) {
  P.validate();
  const int k = P.order();
  std::vector<double> nf(k);
  for (int j = 0; j < k; ++j) nf[j] = P.F[j].empty() ? 0.0 : spectral_norm(P.F[j]);
  ReductionBounds b;
  if (k == 2) {
    b.normA_bound = nf[0];
    b.normA_bound_literal = nf[0];
    b.normB_bound = nf[1];
    return b;
  }
  for (int j = 1; j < k; ++j) b.normA_bound += (k - j) * nf[j - 1];
  for (int i = 1; i < k; ++i) {
    double s = 0.0;
    for (int j = 1; j <= i; ++j) s += nf[j - 1];
    b.normA_bound_literal = std::max(b.normA_bound_literal, (k - i) * s);
  }
  double sb = 0.0;
  for (int j = 2; j <= k; ++j) sb += nf[j - 1];
  b.normB_bound = (k - 1) * sb;
  return b;
}

SparsityBounds sparsity_bounds(const PolynomialSystem& P) {
  P.validate();
  const int k = P.order();
  if (k == 2) return {P.F[0].sparsity(), P.F[1].sparsity()};
  SparsityBounds b;
  for (int i = 1; i < k; ++i) {
    std::size_t sa = 0, sb = 0;
    for (int j = 1; j <= k - i; ++j) sa += P.F[j - 1].sparsity();
    for (int j = k - i + 1; j <= k; ++j) sb += P.F[j - 1].sparsity();
    b.dA = std::max(b.dA, static_cast<std::size_t>(i) * sa);
    b.dB = std::max(b.dB, static_cast<std::size_t>(i) * sb);
  }
  return b;
}

DenseVector lift_polynomial_state(const DenseVector& u, int order) {
  if (order < 2) throw InvalidInput("lift: order must be at least 2");
  DenseVector out, power = u;
  for (int i = 1; i < order; ++i) {
    if (i > 1) power = kron(power, u);
    out.insert(out.end(), power.begin(), power.end());
  }
  return out;
}

QuadraticSystem reduce_to_quadratic(const PolynomialSystem& P, std::size_t max_dim) {
  P.validate();
  const int k = P.order();
  if (k == 2) return QuadraticSystem::make(P.F[0], P.F[1]);

  const std::size_t D = P.D;
  std::vector<std::size_t> offset(k + 1, 0);  // offset[i] of level i in u~, levels 1..k-1
  std::size_t total = 0;
  for (int i = 1; i < k; ++i) {
    offset[i] = total;
    if (checked_pow(D, i) > static_cast<double>(max_dim)) throw CapacityError("reduction: level dimension exceeds cap");
    total += ipow(D, i);
  }
  if (total > max_dim)
    throw CapacityError("reduction: lifted dimension exceeds cap");
  const std::size_t Ntot = total;

  std::vector<Triplet> ta, tb;
  // Level i receives F_j through the Kronecker sum over i positions; the
  // input is u^{(x)s} with s = i + j - 1.
  for (int i = 1; i < k; ++i) {
    for (int j = 1; j <= k; ++j) {
      const SparseMatrix& Fj = P.F[j - 1];
      if (Fj.empty()) continue;
      const int s = i + j - 1;
      const std::size_t Dj = ipow(D, j);
      for (int q = 0; q < i; ++q) {
        const std::size_t outer = ipow(D, q);
        const std::size_t inner = ipow(D, i - q - 1);
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t x = 0; x < D; ++x) {
            for (const auto& e : Fj.row(x)) {
              for (std::size_t t = 0; t < inner; ++t) {
                const std::size_t r = (o * D + x) * inner + t;
                const std::size_t c = (o * Dj + e.col) * inner + t;
                if (s <= k - 1) {
                  ta.push_back({offset[i] + r, offset[s] + c, e.value});
                } else {
                  // u^{(x)s} = u^{(x)(k-1)} (x) u^{(x)(s-k+1)}
                  const int ql = s - k + 1;
                  const std::size_t low = ipow(D, ql);
                  const std::size_t a = c / low;
                  const std::size_t b = c % low;
                  tb.push_back({offset[i] + r, (offset[k - 1] + a) * Ntot + offset[ql] + b, e.value});
                }
              }
            }
          }
        }
      }
    }
  }
  QuadraticSystem out = QuadraticSystem::make(SparseMatrix(Ntot, Ntot, std::move(ta)),
                                              SparseMatrix(Ntot, Ntot * Ntot, std::move(tb)));
  const ReductionBounds bounds = reduction_norm_bounds(P);
  const double slack = 1e-8;
  if (out.normA > bounds.normA_bound * (1 + slack) + slack || out.normB > bounds.normB_bound * (1 + slack) + slack)
    throw InstabilityError("reduction: norm bound violated");
  return out;
}

DenseVector estimate_initial_state(SamplingOracle& o, std::size_t nsamples, OracleCounters& counters) {
  if (nsamples == 0) throw InvalidInput("estimate_initial_state: nsamples must be positive");
  std::vector<std::uint64_t> hits(o.dim(), 0);
  for (std::size_t s = 0; s < nsamples; ++s) ++hits[o.sample(counters).index];
  DenseVector u(o.dim(), 0.0);
  for (std::size_t j = 0; j < u.size(); ++j) {
    if (hits[j] == 0) continue;
    const double a = std::sqrt(static_cast<double>(hits[j]) / static_cast<double>(nsamples));
    u[j] = std::polar(a, o.phases()[j]);
  }
  return u;
}

namespace {

std::pair<std::size_t, Complex> oracle_entry(const SparseMatrix& M, std::size_t i, std::size_t j, std::uint64_t& counter) {
  if (i >= M.rows()) throw InvalidInput("oracle: row out of range");
  if (j == 0) throw InvalidInput("oracle: nonzero index is 1-based");
  const auto row = M.row(i);
  if (j > row.size()) return {i, 0.0};
  ++counter;
  return {row[j - 1].col, row[j - 1].value};
}

}  // namespace

std::pair<std::size_t, Complex> oracle_A(const QuadraticSystem& sys, std::size_t i, std::size_t j,
                                         OracleCounters& counters) {
  return oracle_entry(sys.A, i, j, counters.queries_A);
}

std::pair<std::size_t, Complex> oracle_B(const QuadraticSystem& sys, std::size_t i, std::size_t j,
                                         OracleCounters& counters) {
  return oracle_entry(sys.B, i, j, counters.queries_B);
}

nlohmann::json to_json(const Instance& inst) {
  nlohmann::json j;
  j["kind"] = inst.kind;
  j["n"] = inst.sys.n;
  j["N"] = inst.sys.dim();
  j["A"] = to_json(inst.sys.A);
  j["B"] = to_json(inst.sys.B);
  j["u0"] = to_json(std::span<const Complex>(inst.u0));
  if (inst.U) j["U"] = to_json(inst.U->U);
  return j;
}

Instance instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidInput("instance must be a JSON object");
  static const std::vector<std::string> known = {"kind", "n", "N", "A", "B", "u0", "U"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw InvalidInput("instance: unknown key '" + key + "'");
  }
  if (!j.contains("A") || !j.contains("B") || !j.contains("u0")) throw InvalidInput("instance requires A, B and u0");
  Instance inst;
  inst.kind = j.value("kind", std::string("custom"));
  inst.sys = QuadraticSystem::make(sparse_from_json(j.at("A")), sparse_from_json(j.at("B")));
  if (j.contains("n") && j.at("n").get<int>() != inst.sys.n)
    throw InvalidInput("instance: n does not match the dimension of A");
  if (j.contains("N") && j.at("N").get<std::size_t>() != inst.sys.dim())
    throw InvalidInput("instance: N does not match the dimension of A");
  inst.u0 = vector_from_json(j.at("u0"));
  if (inst.u0.size() != inst.sys.dim()) throw InvalidInput("instance: u0 has wrong dimension");
  if (std::abs(norm(inst.u0) - 1.0) > 1e-10) throw InvalidInput("instance: u0 must have unit norm");
  if (j.contains("U")) {
    inst.U = UnitaryObservable::make(sparse_from_json(j.at("U")));
    if (inst.U->U.rows() != inst.sys.dim()) throw InvalidInput("instance: U has wrong dimension");
  }
  return inst;
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("instance file '" + path + "' is not valid JSON: " + e.what());
  }
  try {
    return instance_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("instance file '" + path + "': " + e.what());
  }
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write instance file '" + path + "'");
  out << to_json(inst).dump(1) << '\n';
}

}  // namespace carleman
