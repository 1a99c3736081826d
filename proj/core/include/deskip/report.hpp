// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "deskip/config.hpp"
#include "deskip/hwmodel.hpp"
#include "deskip/train.hpp"

namespace deskip {

/// Wall time is left out so the document is reproducible byte for byte.
nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);

/// label,stage,epoch,split,loss,accuracy (one row per measured split).
std::string metrics_csv(const std::vector<RunRecord>& records);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// Everything one seed of one command produced.
struct SeedRun {
  std::string command;
  std::string dataset;
  std::uint64_t seed = 0;
  std::vector<RunRecord> records;
};

nlohmann::json to_json(const SeedRun& run);
SeedRun seed_run_from_json(const nlohmann::json& j);

/// Model-variant name used to group records across seeds, e.g.
/// "short-skip teacher", "no-skip (staged)", "no-skip (scratch)".
std::string variant_of(const RunRecord& r);

struct SummaryRow {
  std::string dataset;
  std::string variant;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;  // percent, aligned with seeds
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Groups test accuracies by (dataset, variant), in first-seen order.
std::vector<SummaryRow> summarize(const std::vector<SeedRun>& runs);

/// Every records.json below `dir`, sorted by path. Missing dir -> empty.
std::vector<SeedRun> collect_seed_runs(const std::filesystem::path& dir);

nlohmann::json summary_to_json(const std::vector<SummaryRow>& rows,
                               const std::vector<AccuracyReference>& reference);
std::string summary_table(const std::vector<SummaryRow>& rows,
                          const std::vector<AccuracyReference>& reference);

nlohmann::json comparison_to_json(const hw::ComparisonReport& report,
                                  const std::vector<HwReferenceRow>& reference);
/// Throughput (kHz), FF, LUT, BRAM for the requested mode, then reference
/// rows, then the resblock -> nonresblock changes.
std::string comparison_table(const hw::ComparisonReport& report, hw::SkipMode mode,
                             const std::vector<HwReferenceRow>& reference);

/// Writes `text` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace deskip
