// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "deskip/config.hpp"
#include "deskip/hwmodel.hpp"
#include "deskip/rng.hpp"

namespace deskip::hw {
namespace {

StageSpec conv(std::string name, std::uint64_t c, std::uint64_t hw_, std::uint64_t pe,
               std::uint64_t simd) {
  StageSpec s;
  s.name = std::move(name);
  s.in_channels = c;
  s.out_channels = c;
  s.height = hw_;
  s.width = hw_;
  s.pe = pe;
  s.simd = simd;
  return s;
}

BlockPipeline two_stage(std::uint64_t pe1, std::uint64_t simd1, std::uint64_t pe2,
                        std::uint64_t simd2, bool skip) {
  BlockPipeline p;
  p.name = skip ? "res" : "nonres";
  p.stages = {conv("a", 16, 8, pe1, simd1), conv("b", 16, 8, pe2, simd2)};
  if (skip) p.skip = SkipEdge{0, 1};
  return p;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

TEST(SkipBuffer, Examples) {
  EXPECT_EQ(skip_buffer_bits({64, 8, 8}, 2, 1), 8192u);
  EXPECT_EQ(ceil_div(skip_buffer_bits({64, 8, 8}, 2, 1), 18432), 1u);
  EXPECT_EQ(skip_buffer_bits({64, 8, 8}, 4, 1), 2 * 8192u);
  EXPECT_EQ(skip_buffer_bits({16, 32, 32}, 2, 1), 32768u);
  EXPECT_EQ(ceil_div(skip_buffer_bits({16, 32, 32}, 2, 1), 18432), 2u);
  EXPECT_EQ(skip_depth_frames({0, 1}), 2u);
  EXPECT_EQ(skip_depth_frames({1, 4}), 4u);
}

TEST(StageIi, Examples) {
  StageSpec s = conv("c", 16, 32, 4, 9);
  EXPECT_EQ(stage_ii(s), 65536u);
  StageSpec full = conv("f", 16, 32, 16, 144);
  EXPECT_EQ(stage_ii(full), 32u * 32u);
  StageSpec half = conv("h", 16, 32, 2, 9);
  EXPECT_EQ(stage_ii(half), 2 * stage_ii(s));
  StageSpec strided = conv("s", 16, 32, 4, 9);
  strided.stride = 2;
  EXPECT_EQ(stage_ii(strided), 16u * 16u * 16u * 4u);
}

TEST(StageIi, InvalidFoldingThrows) {
  EXPECT_THROW(stage_ii(conv("c", 16, 8, 3, 9)), ConfigError);
  EXPECT_THROW(stage_ii(conv("c", 16, 8, 4, 7)), ConfigError);
}

TEST(Throughput, SingleStageDefinition) {
  // 1x1 output pixel count 10x10, fold to II = 1000
  BlockPipeline p;
  StageSpec s = conv("c", 1, 10, 1, 1);
  s.kernel = 1;
  s.out_channels = 10;
  p.stages = {s};
  HwConfig hw;
  hw.clock_hz = 100e6;
  ASSERT_EQ(stage_ii(s), 1000u);
  EXPECT_DOUBLE_EQ(block_throughput(p, hw, SkipMode::Buffer), 100e3);
}

TEST(Throughput, NonresIsModeIndependent) {
  const auto p = two_stage(4, 8, 2, 16, false);
  HwConfig hw;
  hw.join_overhead_cycles_per_row = 50;
  EXPECT_EQ(block_throughput(p, hw, SkipMode::Stall), block_throughput(p, hw, SkipMode::Buffer));
}

TEST(Throughput, EqualStagesStallIsSlower) {
  const auto p = two_stage(4, 8, 4, 8, true);
  const HwConfig hw;
  EXPECT_LT(block_throughput(p, hw, SkipMode::Stall), block_throughput(p, hw, SkipMode::Buffer));
  EXPECT_EQ(period_cycles(p, hw, SkipMode::Stall), 2 * period_cycles(p, hw, SkipMode::Buffer));
}

TEST(Resources, EmptyPipelineIsZero) {
  const auto e = estimate_resources(BlockPipeline{}, HwConfig{}, SkipMode::Buffer);
  EXPECT_EQ(e.bram_count, 0u);
  EXPECT_EQ(e.lut_count, 0u);
  EXPECT_EQ(e.ff_count, 0u);
  EXPECT_EQ(e.throughput_fps, 0.0);
  EXPECT_EQ(e.bram_percent, 0.0);
}

TEST(Resources, SkipDeltaIsExactlyTheSkipTerms) {
  HwConfig hw;
  hw.fifo_depth_pixels = 64;
  const auto res = two_stage(4, 8, 2, 16, true);
  const auto non = res.without_skip();
  const auto a = estimate_resources(res, hw, SkipMode::Buffer);
  const auto b = estimate_resources(non, hw, SkipMode::Buffer);
  const std::uint64_t skip_bits =
      skip_buffer_bits(res.stages[0].input_shape(), hw.act_bits, skip_depth_frames(*res.skip));
  EXPECT_EQ(a.bram_count - b.bram_count, ceil_div(skip_bits, hw.bram_capacity_bits));
  EXPECT_EQ(a.lut_count - b.lut_count, hw.lut.per_join_lane_bit * 2 * hw.act_bits);
  EXPECT_EQ(a.ff_count - b.ff_count, hw.ff.per_join_lane_bit * 2 * hw.act_bits);
  // Stall mode holds no skip buffer.
  const auto s = estimate_resources(res, hw, SkipMode::Stall);
  EXPECT_EQ(s.bram_count, b.bram_count);
}

// The resource delta depends on the skip edge and the join's lane count,
// never on the folding of other stages.
TEST(Resources, AdditivityUnderRefolding) {
  HwConfig hw;
  hw.fifo_depth_pixels = 32;
  const auto base_res = two_stage(4, 8, 2, 16, true);
  const auto base = estimate_resources(base_res, hw, SkipMode::Buffer);
  const auto base_non = estimate_resources(base_res.without_skip(), hw, SkipMode::Buffer);
  for (std::uint64_t pe1 : {1u, 2u, 4u, 8u, 16u}) {
    for (std::uint64_t simd1 : {1u, 3u, 9u, 16u, 48u, 144u}) {
      const auto r = two_stage(pe1, simd1, 2, 16, true);
      const auto er = estimate_resources(r, hw, SkipMode::Buffer);
      const auto en = estimate_resources(r.without_skip(), hw, SkipMode::Buffer);
      EXPECT_EQ(er.bram_count - en.bram_count, base.bram_count - base_non.bram_count);
      EXPECT_EQ(er.lut_count - en.lut_count, base.lut_count - base_non.lut_count);
      EXPECT_EQ(er.ff_count - en.ff_count, base.ff_count - base_non.ff_count);
    }
  }
}

TEST(Resources, LinearInBitWidths) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    HwConfig hw;
    hw.weight_bits = 1 + std::uint32_t(rng.below(4));
    hw.act_bits = 1 + std::uint32_t(rng.below(4));
    hw.lut.per_stage = 0;  // constant terms do not scale
    hw.ff.per_stage = 0;
    const auto p = two_stage(4, 8, 2, 16, true);
    const auto e1 = estimate_resources(p, hw, SkipMode::Buffer);
    HwConfig hw2 = hw;
    hw2.weight_bits *= 2;
    hw2.act_bits *= 2;
    const auto e2 = estimate_resources(p, hw2, SkipMode::Buffer);
    EXPECT_EQ(e2.weight_bits, 2 * e1.weight_bits);
    EXPECT_EQ(e2.skip_bits, 2 * e1.skip_bits);
    EXPECT_EQ(e2.lut_count - e2.lut_join, 4 * (e1.lut_count - e1.lut_join));
    EXPECT_EQ(e2.lut_join, 2 * e1.lut_join);
    EXPECT_EQ(e2.ff_count, 2 * e1.ff_count);
  }
}

TEST(Resources, MonotoneInSkipEdge) {
  Rng rng(6);
  const std::uint64_t pes[] = {1, 2, 4, 8, 16};
  const std::uint64_t simds[] = {1, 3, 9, 16, 48, 144};
  for (int trial = 0; trial < 200; ++trial) {
    HwConfig hw;
    hw.fifo_depth_pixels = rng.below(256);
    hw.join_overhead_cycles_per_row = rng.below(200);
    const auto r = two_stage(pes[rng.below(5)], simds[rng.below(6)], pes[rng.below(5)],
                             simds[rng.below(6)], true);
    const auto rep = compare_blocks(r, r.without_skip(), hw);
    for (const auto* m : {&rep.stall, &rep.buffer}) {
      EXPECT_GE(m->nonres.throughput_fps, m->res.throughput_fps);
      EXPECT_LE(m->bram_delta, 0);
      EXPECT_LE(m->lut_delta, 0);
      EXPECT_LE(m->ff_delta, 0);
    }
  }
}

TEST(Compare, SkiplessVsSkiplessIsZero) {
  const auto p = two_stage(4, 8, 2, 16, false);
  const auto rep = compare_blocks(p, p, HwConfig{});
  for (const auto* m : {&rep.stall, &rep.buffer}) {
    EXPECT_EQ(m->bram_delta, 0);
    EXPECT_EQ(m->lut_delta, 0);
    EXPECT_EQ(m->ff_delta, 0);
    EXPECT_EQ(m->throughput_ratio, 1.0);
    EXPECT_EQ(m->throughput_change_percent, 0.0);
  }
}

TEST(Compare, StageMismatchNamesStage) {
  const auto a = two_stage(4, 8, 2, 16, true);
  const auto b = two_stage(4, 8, 4, 16, false);
  try {
    compare_blocks(a, b, HwConfig{});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, ValidationErrors) {
  auto p = two_stage(4, 8, 2, 16, true);
  p.skip = SkipEdge{1, 1};
  EXPECT_THROW(p.validate(), ConfigError);
  p.skip = SkipEdge{0, 2};
  EXPECT_THROW(p.validate(), ConfigError);
  p = two_stage(4, 8, 2, 16, false);
  p.stages[1].in_channels = 8;
  p.stages[1].simd = 8;
  EXPECT_THROW(p.validate(), ConfigError);
  EXPECT_THROW(parse_skip_mode("sometimes"), ConfigError);
}

// The shipped calibration keeps the published direction and rough size.
TEST(Calibration, ShippedConfigReproducesReferenceDirection) {
  const auto cfg = load_hwcompare_config(std::string(DESKIP_CONFIG_DIR) + "/hw_calibration.json");
  const auto rep = compare_blocks(cfg.res, cfg.nonres, cfg.hw);
  const auto& m = rep.buffer;
  EXPECT_NEAR(m.throughput_ratio, 1.415 / 1.352, 0.01);
  EXPECT_LT(m.nonres.bram_percent, m.res.bram_percent);
  EXPECT_LT(m.nonres.lut_percent, m.res.lut_percent);
  EXPECT_LT(m.nonres.ff_percent, m.res.ff_percent);
  EXPECT_NEAR(m.nonres.throughput_fps / 1000.0, 1.415, 0.0015);
  EXPECT_NEAR(m.nonres.bram_percent, 2.68, 0.01);
  EXPECT_NEAR(m.res.lut_percent, 2.97, 0.01);
}

}  // namespace
}  // namespace deskip::hw
