// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

// Named parameter sets on disk.
//
// Layout (all integers little-endian):
//   "NRCK"  u32 version = 1  u32 entry_count
//   per entry: u16 name_len, name (UTF-8), u8 rank, u32 extents[rank],
//              float32 payload (little-endian, row-major)
//   u32 CRC32 (zlib polynomial) of every preceding byte

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "deskip/net.hpp"
#include "deskip/tensor.hpp"

namespace deskip {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointEntry {
  std::string name;
  Tensor value;
  friend bool operator==(const CheckpointEntry&, const CheckpointEntry&) = default;
};

class Checkpoint {
 public:
  Checkpoint() = default;
  explicit Checkpoint(std::vector<CheckpointEntry> entries);

  /// Snapshot of every entry (trainable and running stats) of a store.
  static Checkpoint from_params(const ParamStore& params);
  static Checkpoint from_graph(const NetGraph& graph) { return from_params(graph.params()); }

  const std::vector<CheckpointEntry>& entries() const { return entries_; }
  const CheckpointEntry* find(std::string_view name) const;
  std::size_t size() const { return entries_.size(); }

  std::vector<std::uint8_t> serialize() const;
  static Checkpoint deserialize(std::span<const std::uint8_t> bytes);

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

  /// The trailing CRC32 of the serialized form.
  std::uint32_t checksum() const;

  /// Bitwise equality of names, shapes and payloads.
  bool bit_equal(const Checkpoint& other) const;

 private:
  std::vector<CheckpointEntry> entries_;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Copies every parameter of `dst` from `src`. The name sets must coincide
/// and shapes must agree; otherwise a CheckpointError lists every offender.
NetGraph transfer_weights(const Checkpoint& src, NetGraph dst);

/// True when the graph's parameters equal the checkpoint bit for bit.
bool params_bit_equal(const ParamStore& params, const Checkpoint& ckpt);

}  // namespace deskip
