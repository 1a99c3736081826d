// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/distill.hpp"

#include <algorithm>

namespace deskip {

std::size_t RemovalSchedule::stages() const {
  return (total_skips + group_size - 1) / group_size;
}

void RemovalSchedule::validate() const {
  if (total_skips == 0) throw ConfigError("removal schedule: total_skips must be >= 1");
  if (group_size == 0) throw ConfigError("removal schedule: group_size must be >= 1");
  if (group_size > total_skips) {
    throw ConfigError("removal schedule: group_size " + std::to_string(group_size) +
                      " exceeds total_skips " + std::to_string(total_skips));
  }
}

std::vector<std::size_t> RemovalSchedule::removed_at(std::size_t stage) const {
  validate();
  if (stage > stages()) {
    throw ConfigError("removal schedule: stage " + std::to_string(stage) + " > " +
                      std::to_string(stages()) + " stages");
  }
  const std::size_t upto = std::min(stage * group_size, total_skips);
  std::vector<std::size_t> out(upto);
  for (std::size_t i = 0; i < upto; ++i) out[i] = i + 1;
  return out;
}

std::vector<bool> RemovalSchedule::mask(std::size_t stage) const {
  std::vector<bool> m(total_skips, false);
  for (std::size_t s : removed_at(stage)) m[s - 1] = true;
  return m;
}

PipelineResult staged_removal(const NetSpec& teacher_spec, const RemovalSchedule& schedule,
                              const TrainConfig& cfg, const Dataset& data,
                              const StageObserver& observer) {
  teacher_spec.validate();
  schedule.validate();
  if (schedule.total_skips != teacher_spec.num_blocks()) {
    throw ConfigError("removal schedule: total_skips " + std::to_string(schedule.total_skips) +
                      " != number of blocks " + std::to_string(teacher_spec.num_blocks()));
  }
  for (SkipKind k : teacher_spec.skip_kinds) {
    if (k == SkipKind::None) {
      throw ConfigError("staged removal: the teacher must have a skip on every block");
    }
  }

  PipelineResult out;
  NetGraph teacher = build_net(teacher_spec, cfg.seed);
  if (observer) observer(0, teacher, Checkpoint::from_graph(teacher));
  auto t = train(std::move(teacher), data, cfg, 0, "teacher");
  t.record.stage = 0;
  Checkpoint weights = t.best;
  out.records.push_back(std::move(t.record));
  out.checkpoints.push_back(t.best);

  for (std::size_t stage = 1; stage <= schedule.stages(); ++stage) {
    NetSpec spec = teacher_spec;
    for (std::size_t s : schedule.removed_at(stage)) spec.skip_kinds[s - 1] = SkipKind::None;
    NetGraph model = transfer_weights(weights, build_net_zero(spec));
    if (observer) observer(stage, model, weights);
    auto r = train(std::move(model), data, cfg, stage, "stage" + std::to_string(stage));
    r.record.stage = stage;
    weights = r.best;
    out.records.push_back(std::move(r.record));
    out.checkpoints.push_back(std::move(r.best));
  }
  out.final_checkpoint = weights;
  return out;
}

PipelineResult teacher_student(const NetSpec& spec, const RemovalSchedule& schedule,
                               const TrainConfig& cfg, const Dataset& data,
                               const StageObserver& observer) {
  for (std::size_t i = 0; i < spec.skip_kinds.size(); ++i) {
    if (spec.skip_kinds[i] != SkipKind::Short) {
      throw ConfigError("teacher_student: block " + std::to_string(i + 1) + " is '" +
                        std::string(to_string(spec.skip_kinds[i])) +
                        "'; the teacher must be Short on every block");
    }
  }
  return staged_removal(spec, schedule, cfg, data, observer);
}

RunRecord baseline_scratch(const NetSpec& spec_all_none, const Dataset& data,
                           const TrainConfig& cfg) {
  for (SkipKind k : spec_all_none.skip_kinds) {
    if (k != SkipKind::None) {
      throw ConfigError("baseline_scratch: every block must be None");
    }
  }
  auto r = train(build_net(spec_all_none, cfg.seed), data, cfg, 0, "scratch");
  return std::move(r.record);
}

PipelineResult baseline_direct_from_full(const NetSpec& spec, const Dataset& data,
                                         const TrainConfig& cfg) {
  NetSpec full = spec;
  full.skip_kinds.assign(spec.num_blocks(), SkipKind::Full);
  const RemovalSchedule one_shot{spec.num_blocks(), spec.num_blocks()};
  return staged_removal(full, one_shot, cfg, data);
}

}  // namespace deskip
