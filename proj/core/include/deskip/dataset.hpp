// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "deskip/tensor.hpp"

namespace deskip {

enum class Split { Train, Val, Test };

std::string_view to_string(Split s);

struct LabeledImages {
  Tensor images;  // [N, C, H, W], values in [0, 1]
  std::vector<std::int32_t> labels;
  std::size_t size() const { return labels.size(); }
};

/// Per-channel statistics of the training split.
struct NormStats {
  std::vector<float> mean;
  std::vector<float> std;
};

struct Dataset {
  std::string name;
  std::size_t num_classes = 0;
  LabeledImages train;
  LabeledImages val;
  LabeledImages test;
  NormStats norm;

  const LabeledImages& split(Split s) const;
  std::size_t channels() const { return train.images.dim(1); }

  /// Recomputes `norm` from the training split.
  void compute_normalization();
  /// Throws DataError on out-of-range labels or inconsistent image shapes.
  void validate() const;

  /// Normalized images for `indices` of split `s`, shape [k, C, H, W].
  Tensor batch_images(Split s, std::span<const std::size_t> indices) const;
  std::vector<std::int32_t> batch_labels(Split s,
                                         std::span<const std::size_t> indices) const;
};

struct SyntheticParams {
  std::size_t classes = 10;
  std::size_t train_per_class = 200;
  std::size_t val_per_class = 50;
  std::size_t test_per_class = 100;
  std::size_t size = 28;
  std::size_t channels = 1;
  double difficulty = 0.5;
  std::uint64_t seed = 0;
};

/// Oriented sinusoidal gratings, one orientation/frequency pair per class.
/// `difficulty` in [0, 1] scales orientation jitter, phase randomization and
/// additive pixel noise together; at 0 every image of a class is the same
/// template.
Dataset make_synthetic(const SyntheticParams& p);

inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr std::size_t kCifarSide = 32;
inline constexpr std::size_t kCifarClasses = 10;

/// Decodes every record of a CIFAR-10 binary blob. `file_offset` is added
/// to byte offsets in error messages.
LabeledImages decode_cifar10(std::span<const std::uint8_t> bytes,
                             std::size_t file_offset = 0);

struct Cifar10Params {
  std::filesystem::path path;  // directory with data_batch_*.bin, or one .bin
  std::size_t max_per_class = 500;
  std::size_t val_per_class = 100;
  std::size_t test_per_class = 100;
  std::uint64_t seed = 0;
};

/// Balanced, seed-deterministic subset of CIFAR-10. Train holds at most
/// `max_per_class` images per class; val comes from the remaining training
/// records; test comes from test_batch.bin when present, otherwise from
/// what is left of the training records.
Dataset load_cifar10_binary(const Cifar10Params& p);

}  // namespace deskip
