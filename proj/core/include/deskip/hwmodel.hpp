// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

// Analytical cost model of a streaming (FINN-style) dataflow block. Every
// stage is a folded matrix-vector unit; a block optionally carries one skip
// edge that taps the input of stage `fork` and is added to the output of
// stage `join`.
//
// A skip can be handled two ways:
//   Buffer - the tapped activations are stored in a dedicated BRAM FIFO deep
//            enough for every frame in flight between fork and join.
//   Stall  - nothing is stored; the fork stage may not accept a new frame
//            until the join has consumed the previous one.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deskip/error.hpp"

namespace deskip::hw {

struct LutCoefficients {
  std::uint64_t per_mac_bit = 8;        // x PE x SIMD x weight_bits x act_bits
  std::uint64_t per_stage = 262;        // control, sliding window, thresholds
  std::uint64_t per_join_lane_bit = 4;  // x PE(join stage) x act_bits
  friend bool operator==(const LutCoefficients&, const LutCoefficients&) = default;
};

struct FfCoefficients {
  std::uint64_t per_lane_bit = 4;       // x (PE + SIMD) x act_bits
  std::uint64_t per_stage = 90;
  std::uint64_t per_join_lane_bit = 3;  // x PE(join stage) x act_bits
  friend bool operator==(const FfCoefficients&, const FfCoefficients&) = default;
};

struct HwConfig {
  double clock_hz = 100e6;
  std::uint32_t weight_bits = 1;
  std::uint32_t act_bits = 2;
  std::uint64_t bram_capacity_bits = 18432;  // one 18Kb block RAM
  std::uint64_t luts_total = 53200;
  std::uint64_t ffs_total = 106400;
  std::uint64_t brams_total = 280;
  LutCoefficients lut;
  FfCoefficients ff;
  std::uint64_t fifo_depth_pixels = 0;            // per inter-stage FIFO
  std::uint64_t join_overhead_cycles_per_row = 0; // stream-merge bubbles

  void validate() const;
  friend bool operator==(const HwConfig&, const HwConfig&) = default;
};

struct FeatureShape {
  std::uint64_t channels = 0;
  std::uint64_t height = 0;
  std::uint64_t width = 0;
  std::uint64_t elements() const { return channels * height * width; }
  friend bool operator==(const FeatureShape&, const FeatureShape&) = default;
};

struct StageSpec {
  std::string name;
  std::uint64_t in_channels = 0;
  std::uint64_t height = 0;  // input
  std::uint64_t width = 0;   // input
  std::uint64_t out_channels = 0;
  std::uint64_t kernel = 3;
  std::uint64_t stride = 1;
  std::uint64_t pe = 1;    // output-channel parallelism
  std::uint64_t simd = 1;  // input (dot-product) parallelism

  std::uint64_t out_height() const;
  std::uint64_t out_width() const;
  FeatureShape input_shape() const { return {in_channels, height, width}; }
  FeatureShape output_shape() const { return {out_channels, out_height(), out_width()}; }
  std::uint64_t weight_count() const { return out_channels * in_channels * kernel * kernel; }
  void validate() const;
  friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

/// Taps the input of stage `fork`, joins at the output of stage `join`.
struct SkipEdge {
  std::size_t fork = 0;
  std::size_t join = 1;
  friend bool operator==(const SkipEdge&, const SkipEdge&) = default;
};

struct BlockPipeline {
  std::string name;
  std::vector<StageSpec> stages;
  std::optional<SkipEdge> skip;

  void validate() const;
  /// Copy with the skip edge removed.
  BlockPipeline without_skip() const;
};

enum class SkipMode { Stall, Buffer };

std::string to_string(SkipMode m);
SkipMode parse_skip_mode(const std::string& s);

/// H * W * C * act_bits * depth_frames
std::uint64_t skip_buffer_bits(const FeatureShape& fork_shape, std::uint32_t act_bits,
                               std::uint64_t depth_frames);

/// Frames the skip buffer must hold so the fork never waits on the join:
/// one per stage spanned (each stage holds at most one frame at the
/// bottleneck rate). Independent of folding.
std::uint64_t skip_depth_frames(const SkipEdge& edge);

/// H' * W' * (C_in * k^2 / SIMD) * (C_out / PE)
std::uint64_t stage_ii(const StageSpec& stage);

/// Per-stage service time in cycles; the join stage pays the merge overhead.
std::vector<std::uint64_t> service_cycles(const BlockPipeline& pipeline, const HwConfig& hw);

/// Cycles between frames in steady state. Buffer mode: the slowest stage.
/// Stall mode: additionally the fork's effective II, i.e. its own service
/// time plus the drain time of every stage up to and including the join.
std::uint64_t period_cycles(const BlockPipeline& pipeline, const HwConfig& hw, SkipMode mode);

/// Frames per second.
double block_throughput(const BlockPipeline& pipeline, const HwConfig& hw, SkipMode mode);

struct ResourceEstimate {
  std::uint64_t bram_count = 0;
  std::uint64_t lut_count = 0;
  std::uint64_t ff_count = 0;
  double throughput_fps = 0.0;
  double bram_percent = 0.0;
  double lut_percent = 0.0;
  double ff_percent = 0.0;

  // breakdown
  std::uint64_t weight_bits = 0;
  std::uint64_t fifo_bits = 0;
  std::uint64_t skip_bits = 0;
  std::uint64_t bram_weights = 0;
  std::uint64_t bram_fifos = 0;
  std::uint64_t bram_skip = 0;
  std::uint64_t lut_join = 0;
  std::uint64_t ff_join = 0;
  std::uint64_t period_cycles = 0;
};

ResourceEstimate estimate_resources(const BlockPipeline& pipeline, const HwConfig& hw,
                                    SkipMode mode);

struct ModeComparison {
  SkipMode mode = SkipMode::Buffer;
  ResourceEstimate res;
  ResourceEstimate nonres;
  double throughput_ratio = 1.0;  // nonres / res
  double throughput_change_percent = 0.0;
  std::int64_t bram_delta = 0;  // nonres - res
  std::int64_t lut_delta = 0;
  std::int64_t ff_delta = 0;
  double bram_change_percent = 0.0;  // relative to res
  double lut_change_percent = 0.0;
  double ff_change_percent = 0.0;
  double bram_point_delta = 0.0;  // percent-of-device points
  double lut_point_delta = 0.0;
  double ff_point_delta = 0.0;
};

struct ComparisonReport {
  std::string res_name;
  std::string nonres_name;
  ModeComparison stall;
  ModeComparison buffer;
};

/// `res` and `nonres` must have identical stages; only the skip may differ.
ComparisonReport compare_blocks(const BlockPipeline& res, const BlockPipeline& nonres,
                                const HwConfig& hw);

}  // namespace deskip::hw
