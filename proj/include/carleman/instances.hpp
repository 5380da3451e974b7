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
#include <string>
#include <vector>

#include "carleman/problem.hpp"

namespace carleman {

/// linear-hermitian, gp-toy, random-unitary-flow, one-sparse-diagonal.
const std::vector<std::string>& instance_kinds();

/// N = 2^n. g sets ||B|| for the nonlinear kinds.
Instance gen_instance(const std::string& kind, int n, std::uint64_t seed, double g = 0.15);

/// max |d||u||^2/dt| = max |2 Re <u, f(u)>| over random unit states, real
/// states when real_states is set.
double max_norm_rate(const QuadraticSystem& sys, int samples, std::uint64_t seed, bool real_states);

/// Random states and matrices from counter-based Gaussians.
DenseVector random_unit_vector(std::size_t n, std::uint64_t seed, std::uint64_t stream, bool real);
SparseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, std::uint64_t stream,
                           double density = 1.0, bool real = false);

}  // namespace carleman
