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

#include "carleman/reference.hpp"

#include <boost/numeric/odeint.hpp>

namespace carleman {

namespace odeint = boost::numeric::odeint;

namespace {

using Stepper = odeint::runge_kutta_dopri5<DenseVector, double, DenseVector, double>;

}  // namespace

std::vector<DenseVector> reference_trajectory(const VectorField& f, const DenseVector& u0,
                                              const std::vector<double>& times, double tol) {
  if (!(tol > 0)) throw InvalidInput("reference: tol must be positive");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0 || (i > 0 && times[i] < times[i - 1]))
      throw InvalidInput("reference: times must be sorted and non-negative");
  }
  std::vector<DenseVector> out;
  out.reserve(times.size());
  auto rhs = [&f](const DenseVector& x, DenseVector& dxdt, double) { f(x, dxdt); };
  DenseVector state = u0;
  double t = 0.0;
  for (double target : times) {
    if (target > t) {
      odeint::integrate_adaptive(odeint::make_controlled(tol, tol, Stepper()), rhs, state, t, target,
                                 std::min(1e-3, target - t));
      t = target;
    }
    out.push_back(state);
  }
  return out;
}

DenseVector reference_solve(const VectorField& f, const DenseVector& u0, double T, double tol) {
  return reference_trajectory(f, u0, {T}, tol).front();
}

DenseVector reference_solve(const QuadraticSystem& sys, const DenseVector& u0, double T, double tol) {
  if (u0.size() != sys.dim()) throw InvalidInput("reference: dimension mismatch");
  return reference_solve([&sys](const DenseVector& x, DenseVector& dx) {
    dx.resize(x.size());
    sys.rhs(x, dx);
  }, u0, T, tol);
}

}  // namespace carleman
