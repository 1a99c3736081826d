// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

// JSON documents read by the CLI. Every object rejects keys it does not
// know; errors name the offending path (e.g. "train.lr_steps[1].epoch").

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deskip/dataset.hpp"
#include "deskip/distill.hpp"
#include "deskip/hwmodel.hpp"
#include "deskip/net.hpp"
#include "deskip/train.hpp"

namespace deskip {

struct DatasetSource {
  enum class Kind { Synthetic, Cifar10 };
  Kind kind = Kind::Synthetic;
  SyntheticParams synthetic;
  Cifar10Params cifar;

  std::string name() const;
  std::size_t num_classes() const;
  std::size_t channels() const;
  Dataset load() const;
};

/// A published number printed next to measured ones, never mixed with them.
struct AccuracyReference {
  std::string dataset;
  std::string variant;
  double accuracy = 0.0;  // percent
};

struct ExperimentConfig {
  std::string name;
  NetSpec net;  // skip kinds of the teacher
  TrainConfig train;
  RemovalSchedule schedule;
  DatasetSource dataset;
  std::vector<std::uint64_t> seeds{0};
  std::filesystem::path output_dir = "out";
  std::vector<AccuracyReference> reference;
};

/// Relative dataset paths are resolved against `base_dir`.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& c);

struct HwReferenceRow {
  std::string design;
  double throughput_khz = 0.0;
  double ff_percent = 0.0;
  double lut_percent = 0.0;
  double bram_percent = 0.0;
};

struct HwCompareConfig {
  hw::HwConfig hw;
  hw::BlockPipeline res;
  hw::BlockPipeline nonres;  // defaults to `res` without its skip
  std::vector<HwReferenceRow> reference;
};

hw::HwConfig parse_hw_config(const nlohmann::json& j);
hw::BlockPipeline parse_pipeline(const nlohmann::json& j);
HwCompareConfig parse_hwcompare_config(const nlohmann::json& j);
HwCompareConfig load_hwcompare_config(const std::filesystem::path& path);
nlohmann::json to_json(const hw::HwConfig& c);
nlohmann::json to_json(const hw::BlockPipeline& p);

/// Reads and parses a JSON file; syntax errors become ConfigError.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace deskip
