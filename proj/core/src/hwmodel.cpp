// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/hwmodel.hpp"

#include <algorithm>
#include <numeric>

namespace deskip::hw {

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

double percent(std::uint64_t count, std::uint64_t total) {
  return 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

double change_percent(double from, double to) {
  return from == 0.0 ? 0.0 : 100.0 * (to - from) / from;
}

}  // namespace

void HwConfig::validate() const {
  if (!(clock_hz > 0.0)) throw ConfigError("hw config: clock_hz must be positive");
  if (weight_bits < 1) throw ConfigError("hw config: weight_bits must be >= 1");
  if (act_bits < 1) throw ConfigError("hw config: act_bits must be >= 1");
  if (bram_capacity_bits == 0) throw ConfigError("hw config: bram_capacity_bits must be positive");
  if (luts_total == 0 || ffs_total == 0 || brams_total == 0) {
    throw ConfigError("hw config: device totals must be positive");
  }
}

std::string to_string(SkipMode m) { return m == SkipMode::Stall ? "stall" : "buffer"; }

SkipMode parse_skip_mode(const std::string& s) {
  if (s == "stall") return SkipMode::Stall;
  if (s == "buffer") return SkipMode::Buffer;
  throw ConfigError("unknown skip mode '" + s + "' (expected stall or buffer)");
}

std::uint64_t StageSpec::out_height() const {
  const std::uint64_t pad = (kernel - 1) / 2;
  return (height + 2 * pad - kernel) / stride + 1;
}

std::uint64_t StageSpec::out_width() const {
  const std::uint64_t pad = (kernel - 1) / 2;
  return (width + 2 * pad - kernel) / stride + 1;
}

void StageSpec::validate() const {
  const std::string who = "stage '" + name + "': ";
  if (in_channels == 0 || out_channels == 0 || height == 0 || width == 0 || kernel == 0 ||
      stride == 0) {
    throw ConfigError(who + "extents must be positive");
  }
  if (kernel > height + (kernel - 1) || kernel > width + (kernel - 1)) {
    throw ConfigError(who + "kernel larger than padded input");
  }
  if (pe == 0 || out_channels % pe != 0) {
    throw ConfigError(who + "PE " + std::to_string(pe) + " must divide out_channels " +
                      std::to_string(out_channels));
  }
  const std::uint64_t dot = in_channels * kernel * kernel;
  if (simd == 0 || dot % simd != 0) {
    throw ConfigError(who + "SIMD " + std::to_string(simd) + " must divide C_in*k^2 = " +
                      std::to_string(dot));
  }
}

void BlockPipeline::validate() const {
  for (const auto& s : stages) s.validate();
  for (std::size_t i = 1; i < stages.size(); ++i) {
    if (stages[i].input_shape() != stages[i - 1].output_shape()) {
      throw ConfigError("pipeline '" + name + "': stage " + std::to_string(i) +
                        " input does not match the output of stage " + std::to_string(i - 1));
    }
  }
  if (skip) {
    if (skip->fork >= skip->join) {
      throw ConfigError("pipeline '" + name + "': skip fork " + std::to_string(skip->fork) +
                        " must precede join " + std::to_string(skip->join));
    }
    if (skip->join >= stages.size()) {
      throw ConfigError("pipeline '" + name + "': skip join " + std::to_string(skip->join) +
                        " beyond last stage");
    }
    if (stages[skip->fork].input_shape() != stages[skip->join].output_shape()) {
      throw ConfigError("pipeline '" + name +
                        "': skip tap shape differs from the join output shape");
    }
  }
}

BlockPipeline BlockPipeline::without_skip() const {
  BlockPipeline out = *this;
  out.skip.reset();
  return out;
}

std::uint64_t skip_buffer_bits(const FeatureShape& fork_shape, std::uint32_t act_bits,
                               std::uint64_t depth_frames) {
  return fork_shape.elements() * act_bits * depth_frames;
}

std::uint64_t skip_depth_frames(const SkipEdge& edge) { return edge.join - edge.fork + 1; }

std::uint64_t stage_ii(const StageSpec& stage) {
  stage.validate();
  return stage.out_height() * stage.out_width() *
         (stage.in_channels * stage.kernel * stage.kernel / stage.simd) *
         (stage.out_channels / stage.pe);
}

std::vector<std::uint64_t> service_cycles(const BlockPipeline& pipeline, const HwConfig& hw) {
  std::vector<std::uint64_t> out;
  out.reserve(pipeline.stages.size());
  for (const auto& s : pipeline.stages) out.push_back(stage_ii(s));
  if (pipeline.skip) {
    const auto& join = pipeline.stages[pipeline.skip->join];
    out[pipeline.skip->join] += hw.join_overhead_cycles_per_row * join.out_height();
  }
  return out;
}

std::uint64_t period_cycles(const BlockPipeline& pipeline, const HwConfig& hw, SkipMode mode) {
  pipeline.validate();
  if (pipeline.stages.empty()) return 0;
  const auto svc = service_cycles(pipeline, hw);
  std::uint64_t period = *std::max_element(svc.begin(), svc.end());
  if (pipeline.skip && mode == SkipMode::Stall) {
    const auto first = svc.begin() + static_cast<std::ptrdiff_t>(pipeline.skip->fork);
    const auto last = svc.begin() + static_cast<std::ptrdiff_t>(pipeline.skip->join) + 1;
    period = std::max(period, std::accumulate(first, last, std::uint64_t{0}));
  }
  return period;
}

double block_throughput(const BlockPipeline& pipeline, const HwConfig& hw, SkipMode mode) {
  hw.validate();
  const std::uint64_t p = period_cycles(pipeline, hw, mode);
  return p == 0 ? 0.0 : hw.clock_hz / static_cast<double>(p);
}

ResourceEstimate estimate_resources(const BlockPipeline& pipeline, const HwConfig& hw,
                                    SkipMode mode) {
  hw.validate();
  pipeline.validate();
  ResourceEstimate r;
  for (std::size_t i = 0; i < pipeline.stages.size(); ++i) {
    const auto& s = pipeline.stages[i];
    const std::uint64_t wbits = s.weight_count() * hw.weight_bits;
    r.weight_bits += wbits;
    r.bram_weights += ceil_div(wbits, hw.bram_capacity_bits);
    r.lut_count += hw.lut.per_mac_bit * s.pe * s.simd * hw.weight_bits * hw.act_bits +
                   hw.lut.per_stage;
    r.ff_count += hw.ff.per_lane_bit * (s.pe + s.simd) * hw.act_bits + hw.ff.per_stage;
    if (i + 1 < pipeline.stages.size()) {
      const std::uint64_t fbits = hw.fifo_depth_pixels * s.out_channels * hw.act_bits;
      r.fifo_bits += fbits;
      r.bram_fifos += ceil_div(fbits, hw.bram_capacity_bits);
    }
  }
  if (pipeline.skip) {
    const auto& edge = *pipeline.skip;
    const auto& join = pipeline.stages[edge.join];
    r.lut_join = hw.lut.per_join_lane_bit * join.pe * hw.act_bits;
    r.ff_join = hw.ff.per_join_lane_bit * join.pe * hw.act_bits;
    r.lut_count += r.lut_join;
    r.ff_count += r.ff_join;
    if (mode == SkipMode::Buffer) {
      r.skip_bits = skip_buffer_bits(pipeline.stages[edge.fork].input_shape(), hw.act_bits,
                                     skip_depth_frames(edge));
      r.bram_skip = ceil_div(r.skip_bits, hw.bram_capacity_bits);
    }
  }
  r.bram_count = r.bram_weights + r.bram_fifos + r.bram_skip;
  r.period_cycles = period_cycles(pipeline, hw, mode);
  r.throughput_fps =
      r.period_cycles == 0 ? 0.0 : hw.clock_hz / static_cast<double>(r.period_cycles);
  r.bram_percent = percent(r.bram_count, hw.brams_total);
  r.lut_percent = percent(r.lut_count, hw.luts_total);
  r.ff_percent = percent(r.ff_count, hw.ffs_total);
  return r;
}

namespace {

ModeComparison compare_mode(const BlockPipeline& res, const BlockPipeline& nonres,
                            const HwConfig& hw, SkipMode mode) {
  ModeComparison c;
  c.mode = mode;
  c.res = estimate_resources(res, hw, mode);
  c.nonres = estimate_resources(nonres, hw, mode);
  c.throughput_ratio =
      c.res.throughput_fps == 0.0 ? 1.0 : c.nonres.throughput_fps / c.res.throughput_fps;
  c.throughput_change_percent = change_percent(c.res.throughput_fps, c.nonres.throughput_fps);
  auto delta = [](std::uint64_t a, std::uint64_t b) {
    return static_cast<std::int64_t>(b) - static_cast<std::int64_t>(a);
  };
  c.bram_delta = delta(c.res.bram_count, c.nonres.bram_count);
  c.lut_delta = delta(c.res.lut_count, c.nonres.lut_count);
  c.ff_delta = delta(c.res.ff_count, c.nonres.ff_count);
  c.bram_change_percent = change_percent(static_cast<double>(c.res.bram_count),
                                         static_cast<double>(c.nonres.bram_count));
  c.lut_change_percent = change_percent(static_cast<double>(c.res.lut_count),
                                        static_cast<double>(c.nonres.lut_count));
  c.ff_change_percent = change_percent(static_cast<double>(c.res.ff_count),
                                       static_cast<double>(c.nonres.ff_count));
  c.bram_point_delta = c.nonres.bram_percent - c.res.bram_percent;
  c.lut_point_delta = c.nonres.lut_percent - c.res.lut_percent;
  c.ff_point_delta = c.nonres.ff_percent - c.res.ff_percent;
  return c;
}

}  // namespace

ComparisonReport compare_blocks(const BlockPipeline& res, const BlockPipeline& nonres,
                                const HwConfig& hw) {
  if (res.stages != nonres.stages) {
    for (std::size_t i = 0; i < std::min(res.stages.size(), nonres.stages.size()); ++i) {
      if (!(res.stages[i] == nonres.stages[i])) {
        throw ConfigError("compare_blocks: stage " + std::to_string(i) + " ('" +
                          res.stages[i].name + "') differs between the two pipelines");
      }
    }
    throw ConfigError("compare_blocks: pipelines have " + std::to_string(res.stages.size()) +
                      " and " + std::to_string(nonres.stages.size()) + " stages");
  }
  ComparisonReport r;
  r.res_name = res.name;
  r.nonres_name = nonres.name;
  r.stall = compare_mode(res, nonres, hw, SkipMode::Stall);
  r.buffer = compare_mode(res, nonres, hw, SkipMode::Buffer);
  return r;
}

}  // namespace deskip::hw
