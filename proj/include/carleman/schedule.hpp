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

#include <string>
#include <vector>

#include "carleman/problem.hpp"

namespace carleman {

/// e^{1/e} (e - 1) e, about 6.748.
double surrogate_constant();

double constant_c(double normA, double normB);
double constant_c(const QuadraticSystem& sys);

/// Bound: w = ceil(e^{T c (1+delta)}). Harmonic: the smallest w whose step
/// lengths sum to at least T.
enum class SchedulePolicy { Bound, Harmonic };

SchedulePolicy parse_policy(const std::string& name);
std::string to_string(SchedulePolicy policy);

struct StepSpec {
  int j = 0;
  double hat_t = 0.0;
  double duration = 0.0;  // hat_t rescaled so that the durations sum to T
  int k = 0;
  int m = 0;       // m_j, levels kept after the step
  int m_next = 0;  // m_{j+1} = m_j + k_j, levels entering the step
  double tau = 0.0;
  int substeps = 0;
  int K = 0;
  double eps_star = 0.0;
  double norm_G_tau = 0.0;
};

struct Schedule {
  double T = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double c = 0.0;
  double normA = 0.0;
  double normB = 0.0;
  SchedulePolicy policy = SchedulePolicy::Bound;
  int w = 0;
  std::vector<StepSpec> steps;  // j = w first, j = 1 last

  const StepSpec& step(int j) const { return steps[steps.size() - static_cast<std::size_t>(j)]; }
  double total_hat_t() const;
};

/// Schedule for per-step truncation parameter epsilon.
Schedule build_schedule_eps(double c, double normA, double normB, double T, double epsilon, double delta,
                            SchedulePolicy policy = SchedulePolicy::Bound, const Limits& limits = Limits::from_env());

/// epsilon = E delta^2 / T^2.
Schedule build_schedule(const QuadraticSystem& sys, double T, double E, double delta,
                        SchedulePolicy policy = SchedulePolicy::Bound, const Limits& limits = Limits::from_env());

/// C(k+m-1, k) (b/a)^k e^{m t a} (e^{t a} - 1)^k, or C(k+m-1, k) (b t)^k when a = 0.
double truncation_bound(int m, int k, double t, double normA, double normB);

/// Entry (m, m+k) of e^{S t} for S[p,p] = p a, S[p,p+1] = p b, from the
/// eigendecomposition, evaluated in extended precision.
double surrogate_expm_entry(int m, int k, double t, double normA, double normB);

/// epsilon / (j delta^2).
double tail_bound(const StepSpec& step, double epsilon, double delta);

/// sum_{p <= m_j} sum_{s = k_j}^{k_j + terms - 1} truncation_bound(p, m_j + s - p, hat_t_j).
double summed_tail(const StepSpec& step, double normA, double normB, int terms = 200);

double log_base(double x, double base);

std::string schedule_csv(const Schedule& s);
nlohmann::json to_json(const Schedule& s);

}  // namespace carleman
