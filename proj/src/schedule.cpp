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

#include "carleman/schedule.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "carleman/evolve.hpp"

namespace carleman {

namespace mp = boost::multiprecision;
using Wide = mp::cpp_bin_float_100;

double surrogate_constant() {
  static const double value = std::exp(1.0 / std::numbers::e) * (std::numbers::e - 1.0) * std::numbers::e;
  return value;
}

double constant_c(double normA, double normB) { return std::max(normA, surrogate_constant() * normB); }

double constant_c(const QuadraticSystem& sys) { return constant_c(sys.normA, sys.normB); }

SchedulePolicy parse_policy(const std::string& name) {
  if (name == "bound") return SchedulePolicy::Bound;
  if (name == "harmonic") return SchedulePolicy::Harmonic;
  throw InvalidInput("unknown schedule policy '" + name + "' (expected bound or harmonic)");
}

std::string to_string(SchedulePolicy policy) { return policy == SchedulePolicy::Bound ? "bound" : "harmonic"; }

double log_base(double x, double base) { return std::log(x) / std::log(base); }

double Schedule::total_hat_t() const {
  double s = 0.0;
  for (const auto& st : steps) s += st.hat_t;
  return s;
}

Schedule build_schedule_eps(double c, double normA, double normB, double T, double epsilon, double delta,
                            SchedulePolicy policy, const Limits& limits) {
  if (!(T > 0) || !std::isfinite(T)) throw InvalidInput("schedule: T must be positive");
  if (!(epsilon > 0 && epsilon < 1)) throw InvalidInput("schedule: epsilon must lie in (0, 1)");
  if (!(delta > 0 && delta <= 1)) throw InvalidInput("schedule: delta must lie in (0, 1]");
  if (!(c > 0) || !std::isfinite(c)) throw InvalidInput("schedule: c must be positive");

  Schedule s;
  s.T = T;
  s.epsilon = epsilon;
  s.delta = delta;
  s.c = c;
  s.normA = normA;
  s.normB = normB;
  s.policy = policy;

  const double rate = T * c * (1 + delta);
  double w_real = 0.0;
  if (policy == SchedulePolicy::Bound) {
    w_real = std::ceil(std::exp(rate));
  } else {
    double sum = 0.0;
    w_real = 0.0;
    while (sum < rate) {
      w_real += 1.0;
      sum += 1.0 / w_real;
      if (w_real > static_cast<double>(limits.max_steps)) break;
    }
  }
  if (!std::isfinite(w_real) || w_real > static_cast<double>(limits.max_steps))
    throw CapacityError("schedule: step count w = " + std::to_string(w_real) + " exceeds the cap of " +
                        std::to_string(limits.max_steps));
  const int w = static_cast<int>(w_real);
  s.w = w;

  const double log_eps = log_base(1.0 / epsilon, 1 + delta);
  std::vector<StepSpec> forward(w);
  long long m = 1;
  double hat_sum = 0.0;
  for (int j = 1; j <= w; ++j) {
    StepSpec& st = forward[j - 1];
    st.j = j;
    st.hat_t = 1.0 / (j * c * (1 + delta));
    hat_sum += st.hat_t;
    const double budget = log_eps + log_base(j, 1 + delta);
    st.k = std::max(1, static_cast<int>(std::ceil(budget - 1e-12)));
    st.m = static_cast<int>(m);
    m += st.k;
    if (m > static_cast<long long>(limits.max_levels))
      throw CapacityError("schedule: level count m = " + std::to_string(m) + " exceeds the cap of " +
                          std::to_string(limits.max_levels));
    st.m_next = static_cast<int>(m);
    st.substeps = std::max(1, static_cast<int>(std::ceil(2 * budget - 1e-12)));
    st.eps_star = epsilon / (j * delta * delta);
  }
  for (auto& st : forward) {
    st.duration = st.hat_t * T / hat_sum;
    st.tau = st.duration / st.substeps;
    st.norm_G_tau = st.m_next * (normA + normB) * st.tau;
    st.K = taylor_order(st.norm_G_tau, std::min(st.eps_star, 0.5));
  }
  s.steps.assign(forward.rbegin(), forward.rend());
  return s;
}

Schedule build_schedule(const QuadraticSystem& sys, double T, double E, double delta, SchedulePolicy policy,
                        const Limits& limits) {
  if (!(E > 0 && E < 1)) throw InvalidInput("schedule: E must lie in (0, 1)");
  if (!(T > 0)) throw InvalidInput("schedule: T must be positive");
  const double c = constant_c(sys);
  if (c == 0) throw InvalidInput("schedule: the system is identically zero");
  return build_schedule_eps(c, sys.normA, sys.normB, T, E * delta * delta / (T * T), delta, policy, limits);
}

double truncation_bound(int m, int k, double t, double normA, double normB) {
  if (m < 1 || k < 0 || t < 0) throw InvalidInput("truncation_bound: need m >= 1, k >= 0, t >= 0");
  const double binom = boost::math::binomial_coefficient<double>(static_cast<unsigned>(k + m - 1),
                                                                  static_cast<unsigned>(k));
  if (normA == 0.0) return binom * std::pow(normB * t, k);
  const double ta = t * normA;
  return binom * std::pow(normB / normA, k) * std::exp(m * ta) * std::pow(std::expm1(ta), k);
}

double surrogate_expm_entry(int m, int k, double t, double normA, double normB) {
  if (m < 1 || k < 0 || t < 0) throw InvalidInput("surrogate_expm_entry: need m >= 1, k >= 0, t >= 0");
  if (k == 0) return std::exp(m * t * normA);
  if (normB == 0.0) return 0.0;
  if (normA == 0.0) return truncation_bound(m, k, t, normA, normB);
  // S = V e^{J t} V^{-1} with V[m, m+l] = C(m+l-1, l) r^l and
  // V^{-1}[m+l, m+k] = C(m+k-1, k-l) (-r)^{k-l}, r = b / a.
  const Wide r = Wide(normB) / Wide(normA);
  const Wide ta = Wide(t) * Wide(normA);
  auto binom = [](int n, int l) {
    Wide b = 1;
    for (int i = 1; i <= l; ++i) b = b * (n - l + i) / i;
    return b;
  };
  Wide sum = 0;
  for (int l = 0; l <= k; ++l) {
    const Wide left = binom(m + l - 1, l) * mp::pow(r, l);
    const Wide right = binom(m + k - 1, k - l) * mp::pow(-r, k - l);
    sum += left * mp::exp(Wide(m + l) * ta) * right;
  }
  return static_cast<double>(sum);
}

double tail_bound(const StepSpec& step, double epsilon, double delta) { return epsilon / (step.j * delta * delta); }

double summed_tail(const StepSpec& step, double normA, double normB, int terms) {
  double total = 0.0;
  for (int p = 1; p <= step.m; ++p)
    for (int s = step.k; s < step.k + terms; ++s) total += truncation_bound(p, step.m + s - p, step.hat_t, normA, normB);
  return total;
}

std::string schedule_csv(const Schedule& s) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "j,hat_t,k,m,tau,substeps,eps_star,K\n";
  for (const auto& st : s.steps)
    out << st.j << ',' << st.hat_t << ',' << st.k << ',' << st.m << ',' << st.tau << ',' << st.substeps << ','
        << st.eps_star << ',' << st.K << '\n';
  return out.str();
}

nlohmann::json to_json(const Schedule& s) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& st : s.steps) {
    steps.push_back({{"j", st.j}, {"hat_t", st.hat_t}, {"duration", st.duration}, {"k", st.k}, {"m", st.m},
                     {"m_next", st.m_next}, {"tau", st.tau}, {"substeps", st.substeps}, {"K", st.K},
                     {"eps_star", st.eps_star}, {"norm_G_tau", st.norm_G_tau}});
  }
  return {{"T", s.T}, {"epsilon", s.epsilon}, {"delta", s.delta}, {"c", s.c}, {"normA", s.normA},
          {"normB", s.normB}, {"policy", to_string(s.policy)}, {"w", s.w}, {"steps", steps}};
}

}  // namespace carleman
