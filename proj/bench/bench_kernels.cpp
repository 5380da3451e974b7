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

// OpenMP kernels against their serial references.

#include <benchmark/benchmark.h>

#include <memory>

#include "carleman/carleman.hpp"
#include "carleman/instances.hpp"

using namespace carleman;

namespace {

std::shared_ptr<const QuadraticSystem> bench_system(std::size_t N) {
  const SparseMatrix A = random_matrix(N, N, 1, 1, 0.5);
  const SparseMatrix B = random_matrix(N, N * N, 1, 2, 0.05);
  return std::make_shared<QuadraticSystem>(QuadraticSystem::make(A, B));
}

BlockVector bench_vector(std::size_t N, int m) {
  BlockVector v(N, m);
  const DenseVector u = random_unit_vector(v.size(), 5, 1, false);
  std::copy(u.begin(), u.end(), v.data().begin());
  return v;
}

// args: N, m, workers (0 runs the serial reference)
void BM_apply_G(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const int m = static_cast<int>(state.range(1));
  const int w = static_cast<int>(state.range(2));
  const auto sys = bench_system(N);
  const CarlemanMatrix G(sys, m);
  const BlockVector v = bench_vector(N, m);
  if (w > 0) set_workers(w);
  for (auto _ : state) {
    BlockVector out = w > 0 ? apply_G(G, v) : apply_G_serial(G, v);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
  state.SetLabel(w > 0 ? "omp" : "serial");
}

void BM_apply_A_level(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const int p = static_cast<int>(state.range(1));
  const int w = static_cast<int>(state.range(2));
  const auto sys = bench_system(N);
  std::size_t dim = 1;
  for (int i = 0; i < p; ++i) dim *= N;
  const DenseVector in = random_unit_vector(dim, 3, 1, false);
  DenseVector out(dim);
  if (w > 0) set_workers(w);
  for (auto _ : state) {
    if (w > 0)
      kernels::apply_A_level(sys->A, N, p, in.data(), out.data());
    else
      kernels::apply_A_level_serial(sys->A, N, p, in.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dim));
  state.SetLabel(w > 0 ? "omp" : "serial");
}

}  // namespace

BENCHMARK(BM_apply_G)->ArgsProduct({{4}, {6, 7}, {0, 1, 2, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_apply_A_level)->ArgsProduct({{4, 8}, {5, 6}, {0, 1, 2, 4}})->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
