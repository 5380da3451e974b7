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

#include "carleman/nogo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace carleman {

NonlinearityKappa NonlinearityKappa::make(std::vector<double> coefficients) {
  if (coefficients.empty()) throw InvalidInput("kappa: need at least one coefficient");
  for (double c : coefficients)
    if (!(c >= 0) || !std::isfinite(c)) throw InvalidInput("kappa: coefficients must be finite and non-negative");
  return {std::move(coefficients)};
}

double NonlinearityKappa::operator()(double y) const {
  double acc = 0.0, power = 1.0;
  for (double c : a) {
    power *= y;
    acc += c * power;
  }
  return acc;
}

double NonlinearityKappa::g() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += std::pow(2.0, -0.5 * static_cast<double>(j + 1)) * a[j];
  return acc;
}

double NonlinearityKappa::slope() const {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    acc += static_cast<double>(j + 1) * std::pow(2.0, -0.5 * static_cast<double>(j + 1)) * a[j];
  return acc;
}

BlochState BlochState::make(double x, double y, double z) {
  BlochState s{x, y, z};
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || s.radius() > 1 + 1e-12)
    throw InvalidInput("Bloch state must lie in the unit ball");
  return s;
}

double BlochState::radius() const { return std::sqrt(x * x + y * y + z * z); }

double bloch_distance(const BlochState& a, const BlochState& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

double kappa_bar(const NonlinearityKappa& kap, double z) {
  if (!(z >= -1 && z <= 1)) throw InvalidInput("kappa_bar: z must lie in [-1, 1]");
  return kap(std::sqrt((1 + z) / 2)) - kap(std::sqrt((1 - z) / 2));
}

BlochState nonlinear_step(const BlochState& s, const NonlinearityKappa& kap, double dt) {
  const double angle = kappa_bar(kap, std::clamp(s.z, -1.0, 1.0)) * dt;
  const double c = std::cos(angle), sn = std::sin(angle);
  return {c * s.x - sn * s.y, sn * s.x + c * s.y, s.z};
}

BlochState x_rotation(const BlochState& s, double theta) {
  const double c = std::cos(theta), sn = std::sin(theta);
  return {s.x, c * s.y - sn * s.z, sn * s.y + c * s.z};
}

std::pair<BlochState, BlochState> symmetric_pair(double delta0) {
  if (!(delta0 > 0 && delta0 <= 2)) throw InvalidInput("symmetric_pair: delta0 must lie in (0, 2]");
  const double z = delta0 / 2;
  const double x = std::sqrt(std::max(0.0, 1 - z * z));
  return {BlochState{x, 0.0, z}, BlochState{x, 0.0, -z}};
}

namespace {

// Maximizer of a unimodal function on [lo, hi].
template <class F>
double golden_section_max(F f, double lo, double hi, double tol) {
  const double ratio = (std::sqrt(5.0) - 1) / 2;
  double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - ratio * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + ratio * (hi - lo);
      fd = f(d);
    }
  }
  return (lo + hi) / 2;
}

}  // namespace

ProtocolResult discrimination_protocol(const BlochState& s1, const BlochState& s2, const NonlinearityKappa& kap,
                                       double target_distance, int max_rounds, double dwell) {
  if (max_rounds < 0) throw InvalidInput("protocol: max_rounds must be non-negative");
  if (!(target_distance > 0)) throw InvalidInput("protocol: target distance must be positive");
  ProtocolResult result;
  result.dwell = dwell > 0 ? dwell : 1.0 / (2.0 * kap.g());
  if (!(result.dwell > 0) || !std::isfinite(result.dwell)) throw InvalidInput("protocol: dwell must be positive");
  BlochState a = s1, b = s2;
  double d = bloch_distance(a, b);
  result.log.push_back({0, a.z, b.z, d, 0.0});
  if (d == 0.0) {
    result.exhausted = true;
    result.final_distance = 0.0;
    return result;
  }
  while (d < target_distance && result.rounds < max_rounds) {
    a = nonlinear_step(a, kap, result.dwell);
    b = nonlinear_step(b, kap, result.dwell);
    // With the current z gap made non-negative, the rotated gap is
    // R cos(theta - phi) with |phi| <= pi/2, unimodal on [-pi/2, pi/2].
    const double sign = a.z - b.z >= 0 ? 1.0 : -1.0;
    auto gap = [&](double theta) { return sign * (x_rotation(a, theta).z - x_rotation(b, theta).z); };
    const double theta = golden_section_max(gap, -std::numbers::pi / 2, std::numbers::pi / 2, 1e-10);
    a = x_rotation(a, theta);
    b = x_rotation(b, theta);
    d = bloch_distance(a, b);
    ++result.rounds;
    result.log.push_back({result.rounds, a.z, b.z, d, theta});
  }
  result.reached = d >= target_distance;
  result.exhausted = !result.reached;
  result.final_distance = d;
  return result;
}

}  // namespace carleman
