// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

// Staged skip removal ("teacher-student" in the weight-transfer sense):
// train a teacher, then repeatedly drop the next group of skips from the
// front of the network, initialize the new topology with the previous
// weights and retrain, until no skip remains.

#pragma once

#include <functional>
#include <vector>

#include "deskip/train.hpp"

namespace deskip {

struct RemovalSchedule {
  std::size_t total_skips = 9;
  std::size_t group_size = 3;

  std::size_t stages() const;
  /// 1-based skip indices removed by the end of `stage` (1-based):
  /// {1, ..., min(stage * group_size, total_skips)}.
  std::vector<std::size_t> removed_at(std::size_t stage) const;
  /// Per skip, true when removed by the end of `stage`. Stage 0 removes none.
  std::vector<bool> mask(std::size_t stage) const;
  void validate() const;
};

struct PipelineResult {
  Checkpoint final_checkpoint;
  std::vector<RunRecord> records;       // teacher first, then one per stage
  std::vector<Checkpoint> checkpoints;  // aligned with records
};

/// Called at every stage entry after weight transfer and before training.
using StageObserver = std::function<void(std::size_t stage, const NetGraph& entry,
                                         const Checkpoint& inherited)>;

/// Trains `teacher_spec` from its random init, then runs the removal stages.
/// Skips are numbered front to back over the teacher's blocks.
PipelineResult staged_removal(const NetSpec& teacher_spec, const RemovalSchedule& schedule,
                              const TrainConfig& cfg, const Dataset& data,
                              const StageObserver& observer = {});

/// The Short-teacher pipeline. Requires every block of `spec` to be Short.
PipelineResult teacher_student(const NetSpec& spec, const RemovalSchedule& schedule,
                               const TrainConfig& cfg, const Dataset& data,
                               const StageObserver& observer = {});

/// Trains the chain topology (every block None) from random init.
RunRecord baseline_scratch(const NetSpec& spec_all_none, const Dataset& data,
                           const TrainConfig& cfg);

/// Full-skip teacher, all skips removed in one step, then retrained.
PipelineResult baseline_direct_from_full(const NetSpec& spec, const Dataset& data,
                                         const TrainConfig& cfg);

}  // namespace deskip
