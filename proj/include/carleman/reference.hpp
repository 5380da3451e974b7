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

#include <functional>
#include <vector>

#include "carleman/problem.hpp"

namespace carleman {

using VectorField = std::function<void(const DenseVector&, DenseVector&)>;

/// Adaptive Dormand-Prince 5(4) with absolute and relative tolerance tol.
DenseVector reference_solve(const VectorField& f, const DenseVector& u0, double T, double tol = 1e-12);

/// States at each of the sorted, non-negative times.
std::vector<DenseVector> reference_trajectory(const VectorField& f, const DenseVector& u0,
                                              const std::vector<double>& times, double tol = 1e-12);

DenseVector reference_solve(const QuadraticSystem& sys, const DenseVector& u0, double T, double tol = 1e-12);

}  // namespace carleman
