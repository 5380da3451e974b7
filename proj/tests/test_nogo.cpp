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

#include <numbers>

#include <gtest/gtest.h>

using namespace carleman;

namespace {

const double kPi = std::numbers::pi;

double r_squared(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy * sxy / (sxx * syy);
}

}  // namespace

TEST(kappa, validation_and_constants) {
  EXPECT_THROW(NonlinearityKappa::make({}), InvalidInput);
  EXPECT_THROW(NonlinearityKappa::make({1.0, -0.5}), InvalidInput);
  const auto k = NonlinearityKappa::make({0.3, 0.0, 2.0});
  EXPECT_NEAR(k.g(), 0.3 / std::sqrt(2.0) + 2.0 / std::pow(2.0, 1.5), 1e-12);
  EXPECT_NEAR(k.slope(), 0.3 / std::sqrt(2.0) + 3 * 2.0 / std::pow(2.0, 1.5), 1e-12);
  EXPECT_DOUBLE_EQ(k(0.5), 0.3 * 0.5 + 2.0 * 0.125);
}

TEST(kappa_bar, square_nonlinearity_is_identity) {
  const auto k = NonlinearityKappa::make({0.0, 1.0});
  for (double z = -1.0; z <= 1.0; z += 1.0 / 64) EXPECT_NEAR(kappa_bar(k, z), z, 4e-16);
}

TEST(kappa_bar, odd_and_zero_at_origin) {
  for (const auto& a : {std::vector<double>{1.0}, std::vector<double>{0.2, 0.5, 1.5}, std::vector<double>{0, 0, 0, 1}}) {
    const auto k = NonlinearityKappa::make(a);
    EXPECT_EQ(kappa_bar(k, 0.0), 0.0);
    for (double z : {0.1, 0.5, 0.9}) EXPECT_NEAR(kappa_bar(k, -z), -kappa_bar(k, z), 1e-15);
  }
}

TEST(kappa_bar, finite_difference_slope) {
  const auto lin = NonlinearityKappa::make({1.0});
  EXPECT_NEAR(kappa_bar(lin, 1e-6) / 1e-6, std::pow(2.0, -0.5), 1e-9);
  const auto mix = NonlinearityKappa::make({0.4, 1.0, 0.7});
  EXPECT_NEAR(kappa_bar(mix, 1e-6) / 1e-6, mix.slope(), 1e-8);
}

TEST(nonlinear_step, fixed_point_half_turn_and_composition) {
  const auto k = NonlinearityKappa::make({0.0, 1.0});
  const BlochState eq = BlochState::make(0.6, 0.8, 0.0);
  const BlochState s0 = nonlinear_step(eq, k, 3.0);
  EXPECT_EQ(s0.x, eq.x);
  EXPECT_EQ(s0.y, eq.y);
  const BlochState pole = BlochState::make(0.0, 0.0, 1.0);
  EXPECT_EQ(nonlinear_step(pole, k, kPi).z, 1.0);
  const BlochState s = BlochState::make(0.6, 0.0, 0.8);
  const BlochState h = nonlinear_step(s, k, kPi / 0.8);
  EXPECT_NEAR(h.x, -0.6, 1e-14);
  EXPECT_NEAR(h.y, 0.0, 1e-14);
  BlochState c = s;
  for (int i = 0; i < 10; ++i) c = nonlinear_step(c, k, 0.07);
  const BlochState once = nonlinear_step(s, k, 0.7);
  EXPECT_NEAR(c.x, once.x, 1e-12);
  EXPECT_NEAR(c.y, once.y, 1e-12);
  EXPECT_EQ(c.z, s.z);
}

TEST(bloch, rotations_preserve_radius) {
  const auto k = NonlinearityKappa::make({0.5, 0.5});
  BlochState s = BlochState::make(0.3, -0.4, std::sqrt(1 - 0.25));
  for (int i = 0; i < 200; ++i) {
    s = nonlinear_step(s, k, 0.3);
    s = x_rotation(s, 0.1 * i);
    EXPECT_NEAR(s.radius(), 1.0, 1e-12);
  }
  EXPECT_THROW(BlochState::make(1.0, 1.0, 0.0), InvalidInput);
  EXPECT_NEAR(bloch_distance(BlochState::make(0, 0, 1), BlochState::make(0, 0, -1)), 2.0, 1e-15);
}

TEST(protocol, equal_states_exhaust_immediately) {
  const auto k = NonlinearityKappa::make({0.0, 1.0});
  const BlochState s = BlochState::make(0.0, 0.0, 1.0);
  const ProtocolResult r = discrimination_protocol(s, s, k, 0.5, 100);
  EXPECT_EQ(r.rounds, 0);
  EXPECT_TRUE(r.exhausted);
  EXPECT_FALSE(r.reached);
  EXPECT_EQ(r.final_distance, 0.0);
}

TEST(protocol, symmetric_pair_distance) {
  const auto [a, b] = symmetric_pair(0.125);
  EXPECT_NEAR(bloch_distance(a, b), 0.125, 1e-15);
  EXPECT_NEAR(a.radius(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(a.z, 0.0625);
  EXPECT_DOUBLE_EQ(b.z, -0.0625);
}

TEST(protocol, rounds_grow_linearly_in_log_inverse_distance) {
  const auto k = NonlinearityKappa::make({0.0, 1.0});
  std::vector<double> x, y;
  for (int e = 4; e <= 14; ++e) {
    const auto [a, b] = symmetric_pair(std::ldexp(1.0, -e));
    const ProtocolResult r = discrimination_protocol(a, b, k, 0.5, 10000);
    ASSERT_TRUE(r.reached);
    EXPECT_GE(r.final_distance, 0.5);
    EXPECT_EQ(static_cast<int>(r.log.size()), r.rounds + 1);
    x.push_back(e);
    y.push_back(r.rounds);
  }
  EXPECT_GE(r_squared(x, y), 0.95);
}

TEST(protocol, doubling_g_halves_dwell_normalized_rounds) {
  const auto k1 = NonlinearityKappa::make({0.5, 1.0});
  const auto k2 = NonlinearityKappa::make({1.0, 2.0});
  const auto [a, b] = symmetric_pair(std::ldexp(1.0, -10));
  const ProtocolResult r1 = discrimination_protocol(a, b, k1, 0.5, 10000);
  const ProtocolResult r2 = discrimination_protocol(a, b, k2, 0.5, 10000);
  EXPECT_DOUBLE_EQ(r1.dwell, 1 / (2 * k1.g()));
  const double ratio = (r2.rounds * r2.dwell) / (r1.rounds * r1.dwell);
  EXPECT_NEAR(ratio, 0.5, 0.5 * 0.25);
}

TEST(protocol, round_cap_is_reported) {
  const auto k = NonlinearityKappa::make({0.0, 1.0});
  const auto [a, b] = symmetric_pair(1e-6);
  const ProtocolResult r = discrimination_protocol(a, b, k, 0.5, 3);
  EXPECT_EQ(r.rounds, 3);
  EXPECT_TRUE(r.exhausted);
  EXPECT_FALSE(r.reached);
}
