// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "deskip/ops.hpp"
#include "deskip/rng.hpp"

namespace {

using namespace deskip;

Tensor filled(const Shape& s, std::uint64_t seed) {
  Tensor t(s);
  Rng rng(seed);
  for (auto& v : t.data()) v = static_cast<float>(rng.normal());
  return t;
}

// args: batch, channels, side, algorithm (0 im2col, 1 direct)
void BM_Conv2dForward(benchmark::State& state) {
  const auto n = std::size_t(state.range(0)), c = std::size_t(state.range(1)),
             s = std::size_t(state.range(2));
  const auto algo = state.range(3) == 0 ? ConvAlgo::Im2col : ConvAlgo::Direct;
  const Tensor x = filled({n, c, s, s}, 1), w = filled({c, c, 3, 3}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_forward(x, w, {1, 1}, algo));
  state.SetItemsProcessed(state.iterations() * std::int64_t(n * c * c * s * s * 9));
}
BENCHMARK(BM_Conv2dForward)
    ->ArgNames({"n", "c", "hw", "direct"})
    ->Args({32, 8, 28, 0})
    ->Args({32, 8, 28, 1})
    ->Args({32, 16, 14, 0})
    ->Args({32, 16, 14, 1})
    ->Args({32, 32, 7, 0})
    ->Args({32, 32, 7, 1});

void BM_Conv2dBackward(benchmark::State& state) {
  const auto n = std::size_t(state.range(0)), c = std::size_t(state.range(1)),
             s = std::size_t(state.range(2));
  const auto algo = state.range(3) == 0 ? ConvAlgo::Im2col : ConvAlgo::Direct;
  const Tensor x = filled({n, c, s, s}, 1), w = filled({c, c, 3, 3}, 2);
  const Tensor dy = filled({n, c, s, s}, 3);
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_backward(x, w, dy, {1, 1}, algo));
}
BENCHMARK(BM_Conv2dBackward)
    ->ArgNames({"n", "c", "hw", "direct"})
    ->Args({32, 8, 28, 0})
    ->Args({32, 8, 28, 1})
    ->Args({32, 32, 7, 0})
    ->Args({32, 32, 7, 1});

}  // namespace
