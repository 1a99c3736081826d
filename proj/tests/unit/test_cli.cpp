// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace deskip {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "deskip");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("deskip_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string config(const char* name) { return std::string(DESKIP_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

TEST(Cli, ReportOnEmptyDirIsEmptySummary) {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  const auto r = run({"report", "--out", dir.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(slurp(dir / "summary.json"));
  EXPECT_TRUE(j["measured"].empty());
}

TEST(Cli, MissingConfigGivesErrorJson) {
  const auto r = run({"distill", "--config", "/nonexistent.json"});
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.err);
  EXPECT_EQ(j["error"]["kind"], "config");
  EXPECT_FALSE(j["error"]["message"].get<std::string>().empty());
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"run"}).code, 2);
  const auto r = run({"hwcompare", "--config", config("hw_calibration.json"), "--mode", "maybe"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(json::parse(r.err).contains("error"));
}

TEST(Cli, HwcompareTableHasFourColumns) {
  const auto dir = scratch("hw");
  const auto r = run({"hwcompare", "--config", config("hw_calibration.json"), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* col : {"Design", "Throughput (kHz)", "FF (%)", "LUT (%)", "BRAM (%)"}) {
    EXPECT_NE(r.out.find(col), std::string::npos) << col;
  }
  EXPECT_NE(r.out.find("[reference]"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "hwcompare.json"));
  const auto j = json::parse(slurp(dir / "hwcompare.json"));
  EXPECT_TRUE(j.contains("buffer"));
  EXPECT_TRUE(j.contains("stall"));
}

TEST(Cli, WorkerCountHonoursEnvironment) {
  ::setenv("DESKIP_THREADS", "2", 1);
  EXPECT_EQ(cli::worker_count(8), 2u);
  EXPECT_EQ(cli::worker_count(1), 1u);
  ::unsetenv("DESKIP_THREADS");
  EXPECT_GE(cli::worker_count(8), 1u);
}

// Toy distill end to end: teacher plus one record per stage, final
// checkpoint with no skips, reproducible bytes on rerun.
TEST(Cli, DistillToyIsCompleteAndReproducible) {
  const auto a = scratch("toy_a"), b = scratch("toy_b");
  auto r = run({"distill", "--config", config("toy.json"), "--out", a.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  r = run({"distill", "--config", config("toy.json"), "--out", b.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sa = cli::seed_dir(a, 0), sb = cli::seed_dir(b, 0);
  const auto rec = json::parse(slurp(sa / "records.json"));
  ASSERT_EQ(rec["records"].size(), 4u);
  EXPECT_EQ(rec["records"][0]["label"], "teacher");
  EXPECT_EQ(rec["records"][3]["fork_join_pairs"], 0);
  for (const char* f : {"metrics.csv", "records.json", "teacher.nrck", "stage3.nrck",
                        "final.nrck"}) {
    ASSERT_TRUE(fs::exists(sa / f)) << f;
    EXPECT_EQ(slurp(sa / f), slurp(sb / f)) << f;
  }
  r = run({"report", "--out", a.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(json::parse(slurp(a / "summary.json"))["measured"].empty());
}

TEST(Cli, SeedOverride) {
  const auto a = scratch("seed");
  const auto r = run({"run", "--config", config("toy.json"), "--out", a.string(), "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(cli::seed_dir(a, 7) / "records.json"));
  EXPECT_FALSE(fs::exists(cli::seed_dir(a, 0)));
}

}  // namespace
}  // namespace deskip
