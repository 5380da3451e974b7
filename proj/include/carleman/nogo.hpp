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

#include <vector>

#include "carleman/linalg.hpp"

namespace carleman {

/// kappa(y) = sum_j a_j y^j with a[0] = a_1.
struct NonlinearityKappa {
  std::vector<double> a;

  static NonlinearityKappa make(std::vector<double> coefficients);
  double operator()(double y) const;
  /// sum_j 2^{-j/2} a_j.
  double g() const;
  /// d kappa_bar / dz at z = 0, sum_j j 2^{-j/2} a_j.
  double slope() const;
};

struct BlochState {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static BlochState make(double x, double y, double z);
  double radius() const;
};

double bloch_distance(const BlochState& a, const BlochState& b);

/// kappa(((1+z)/2)^{1/2}) - kappa(((1-z)/2)^{1/2}).
double kappa_bar(const NonlinearityKappa& kap, double z);

/// Rotates (x, y) about the z axis by kappa_bar(z) dt; z is unchanged.
BlochState nonlinear_step(const BlochState& s, const NonlinearityKappa& kap, double dt);

/// Rotation about the x axis by theta.
BlochState x_rotation(const BlochState& s, double theta);

struct ProtocolRound {
  int round = 0;
  double z1 = 0.0;
  double z2 = 0.0;
  double distance = 0.0;
  double theta = 0.0;
};

struct ProtocolResult {
  int rounds = 0;
  bool reached = false;
  bool exhausted = false;
  double dwell = 0.0;
  double final_distance = 0.0;
  std::vector<ProtocolRound> log;  // round 0 is the initial pair
};

/// Alternates a nonlinear dwell with the x rotation that maximizes the
/// z separation, until the Bloch distance reaches target_distance.
/// dwell <= 0 selects 1 / (2 g).
ProtocolResult discrimination_protocol(const BlochState& s1, const BlochState& s2, const NonlinearityKappa& kap,
                                       double target_distance, int max_rounds, double dwell = 0.0);

/// States at z = +-delta0 / 2 on the x-z great circle, Bloch distance delta0.
std::pair<BlochState, BlochState> symmetric_pair(double delta0);

}  // namespace carleman
