// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "deskip/hwmodel.hpp"

namespace {

using namespace deskip::hw;

BlockPipeline chain(std::size_t stages) {
  BlockPipeline p;
  for (std::size_t i = 0; i < stages; ++i) {
    StageSpec s;
    s.name = "conv" + std::to_string(i);
    s.in_channels = s.out_channels = 64;
    s.height = s.width = 8;
    s.pe = 4;
    s.simd = 8;
    p.stages.push_back(s);
  }
  if (stages >= 2) p.skip = SkipEdge{0, stages - 1};
  return p;
}

void BM_BlockThroughput(benchmark::State& state) {
  const auto p = chain(std::size_t(state.range(0)));
  const HwConfig hw;
  for (auto _ : state) benchmark::DoNotOptimize(block_throughput(p, hw, SkipMode::Stall));
}
BENCHMARK(BM_BlockThroughput)->Arg(2)->Arg(6)->Arg(18);

void BM_CompareBlocks(benchmark::State& state) {
  const auto p = chain(std::size_t(state.range(0)));
  const auto q = p.without_skip();
  const HwConfig hw;
  for (auto _ : state) benchmark::DoNotOptimize(compare_blocks(p, q, hw));
}
BENCHMARK(BM_CompareBlocks)->Arg(2)->Arg(18);

}  // namespace
