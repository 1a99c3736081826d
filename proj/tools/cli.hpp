// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deskip/config.hpp"
#include "deskip/report.hpp"

namespace deskip::cli {

/// Entry point of the `deskip` tool. Returns the process exit code; on
/// failure a one-line JSON error object is written to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Worker count for the seed pool: DESKIP_THREADS when set, else the
/// hardware concurrency, never more than `jobs`.
std::size_t worker_count(std::size_t jobs);

/// Directory of one seed below the output root.
std::filesystem::path seed_dir(const std::filesystem::path& root, std::uint64_t seed);

// The experiment commands, callable in-process. Each writes one directory
// per seed and returns what it recorded, in seed order.
std::vector<SeedRun> command_run(const ExperimentConfig& cfg, std::ostream& log);
std::vector<SeedRun> command_distill(const ExperimentConfig& cfg, std::ostream& log);
std::vector<SeedRun> command_baseline(const ExperimentConfig& cfg, std::ostream& log);

}  // namespace deskip::cli
