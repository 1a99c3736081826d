// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "deskip/checkpoint.hpp"
#include "deskip/dataset.hpp"
#include "deskip/net.hpp"

namespace deskip {

/// Learning rate `lr` applies from 0-based epoch `epoch` onward.
struct LrStep {
  std::size_t epoch = 0;
  double lr = 0.0;
  friend bool operator==(const LrStep&, const LrStep&) = default;
};

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double lr = 0.05;
  std::vector<LrStep> lr_steps;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::uint64_t seed = 0;
  std::size_t eval_every = 1;
  std::size_t eval_batch_size = 250;

  double lr_at(std::size_t epoch) const;
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

struct EpochMetrics {
  std::size_t epoch = 0;  // 0 = before any update
  double lr = 0.0;
  std::optional<double> train_loss;
  std::optional<double> train_accuracy;
  std::optional<double> val_loss;
  std::optional<double> val_accuracy;
  friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

struct RunRecord {
  std::string label;  // "teacher", "stage1", "scratch", ...
  std::size_t stage = 0;
  std::vector<SkipKind> skip_mask;
  std::vector<EpochMetrics> epochs;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
  std::uint32_t entry_checksum = 0;       // parameters before training
  std::uint32_t checkpoint_checksum = 0;  // returned (best) checkpoint
  std::string checkpoint_path;
  double wall_time_s = 0.0;
  bool diverged = false;
  std::string diagnostic;

  std::size_t fork_join_pairs() const;
};

/// Thrown when the training loss becomes non-finite; carries the record up
/// to the failing step.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, RunRecord record)
      : Error(what), record_(std::move(record)) {}
  const char* kind() const noexcept override { return "diverged"; }
  const RunRecord& record() const { return record_; }

 private:
  RunRecord record_;
};

struct TrainResult {
  Checkpoint best;
  RunRecord record;
};

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Eval-mode loss and accuracy over a whole split.
EvalResult evaluate(const NetGraph& graph, const Dataset& data, Split split,
                    std::size_t batch_size = 250);

/// SGD with momentum over shuffled mini-batches. The returned checkpoint is
/// the one with the highest validation accuracy (earliest epoch on ties);
/// epoch 0 is the incoming weights. Deterministic in (graph, data, cfg,
/// stream). `stream` separates the batch orders of runs sharing a seed.
TrainResult train(NetGraph graph, const Dataset& data, const TrainConfig& cfg,
                  std::uint64_t stream = 0, std::string label = "run");

}  // namespace deskip
