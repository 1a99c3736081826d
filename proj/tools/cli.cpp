// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "deskip/checkpoint.hpp"
#include "deskip/distill.hpp"

namespace deskip::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using SeedFn = std::function<std::vector<RunRecord>(const TrainConfig& train, const Dataset& data,
                                                    const fs::path& dir)>;

void save_checkpoint(const Checkpoint& ckpt, RunRecord& rec, const fs::path& dir) {
  const std::string file = rec.label + ".nrck";
  ckpt.save(dir / file);
  rec.checkpoint_path = file;
}

void write_seed_outputs(const SeedRun& run, const fs::path& dir) {
  write_text_file(dir / "records.json", to_json(run).dump(2) + "\n");
  write_text_file(dir / "metrics.csv", metrics_csv(run.records));
  json timing = json::array();
  for (const auto& r : run.records) {
    timing.push_back({{"label", r.label}, {"wall_time_s", r.wall_time_s}});
  }
  write_text_file(dir / "timing.json",
                  json{{"seed", run.seed}, {"records", timing}}.dump(2) + "\n");
}

std::vector<SeedRun> for_each_seed(const ExperimentConfig& cfg, const std::string& command,
                                   std::ostream& log, const SeedFn& fn) {
  const Dataset data = cfg.dataset.load();
  fs::create_directories(cfg.output_dir);
  json resolved = to_json(cfg);
  resolved.erase("output_dir");  // keeps reruns into another directory byte-identical
  write_text_file(cfg.output_dir / "config.json", resolved.dump(2) + "\n");

  const std::size_t n = cfg.seeds.size();
  std::vector<SeedRun> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      SeedRun& run = results[i];
      run.command = command;
      run.dataset = cfg.dataset.name();
      run.seed = cfg.seeds[i];
      const fs::path dir = seed_dir(cfg.output_dir, run.seed);
      try {
        fs::create_directories(dir);
        TrainConfig t = cfg.train;
        t.seed = run.seed;
        run.records = fn(t, data, dir);
        write_seed_outputs(run, dir);
        std::lock_guard lock(log_mutex);
        for (const auto& r : run.records) {
          log << command << " seed " << run.seed << ": " << r.label << " test accuracy "
              << format_number(r.test_accuracy) << " (best epoch " << r.best_epoch << ")\n";
        }
      } catch (const TrainingDiverged& e) {
        run.records.push_back(e.record());
        try {
          write_seed_outputs(run, dir);
        } catch (...) {
        }
        errors[i] = std::current_exception();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t workers = worker_count(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << "\n";
}

json run_summary(const std::vector<SeedRun>& runs, const fs::path& out_dir) {
  json seeds = json::array();
  for (const auto& run : runs) {
    json recs = json::array();
    for (const auto& r : run.records) {
      recs.push_back({{"label", r.label},
                      {"test_accuracy", r.test_accuracy},
                      {"best_val_accuracy", r.best_val_accuracy},
                      {"checkpoint", r.checkpoint_path}});
    }
    seeds.push_back({{"seed", run.seed}, {"records", recs}});
  }
  return {{"output_dir", out_dir.generic_string()}, {"seeds", seeds}};
}

}  // namespace

std::size_t worker_count(std::size_t jobs) {
  std::size_t cap = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DESKIP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) cap = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ConfigError(std::string("DESKIP_THREADS: not an integer: '") + env + "'");
    }
  }
  return std::max<std::size_t>(1, std::min(cap, jobs));
}

fs::path seed_dir(const fs::path& root, std::uint64_t seed) {
  return root / ("seed-" + std::to_string(seed));
}

std::vector<SeedRun> command_run(const ExperimentConfig& cfg, std::ostream& log) {
  return for_each_seed(cfg, "run", log, [&](const TrainConfig& t, const Dataset& data,
                                             const fs::path& dir) {
    auto r = train(build_net(cfg.net, t.seed), data, t, 0, "run");
    save_checkpoint(r.best, r.record, dir);
    return std::vector<RunRecord>{std::move(r.record)};
  });
}

std::vector<SeedRun> command_distill(const ExperimentConfig& cfg, std::ostream& log) {
  return for_each_seed(cfg, "distill", log, [&](const TrainConfig& t, const Dataset& data,
                                                 const fs::path& dir) {
    auto p = staged_removal(cfg.net, cfg.schedule, t, data);
    for (std::size_t i = 0; i < p.records.size(); ++i) {
      save_checkpoint(p.checkpoints[i], p.records[i], dir);
    }
    p.final_checkpoint.save(dir / "final.nrck");
    return std::move(p.records);
  });
}

std::vector<SeedRun> command_baseline(const ExperimentConfig& cfg, std::ostream& log) {
  return for_each_seed(cfg, "baseline", log, [&](const TrainConfig& t, const Dataset& data,
                                                  const fs::path& dir) {
    std::vector<RunRecord> out;
    NetSpec chain = cfg.net;
    chain.skip_kinds.assign(chain.num_blocks(), SkipKind::None);
    auto s = train(build_net(chain, t.seed), data, t, 0, "scratch");
    save_checkpoint(s.best, s.record, dir);
    out.push_back(std::move(s.record));

    auto d = baseline_direct_from_full(cfg.net, data, t);
    const char* labels[] = {"full_teacher", "direct"};
    for (std::size_t i = 0; i < d.records.size(); ++i) {
      d.records[i].label = labels[i];
      save_checkpoint(d.checkpoints[i], d.records[i], dir);
      out.push_back(std::move(d.records[i]));
    }
    return out;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"deskip: staged skip removal for residual networks and a dataflow cost model",
               "deskip"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string mode = "buffer";

  auto add_experiment = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "single seed, overrides the config's seed list");
    sub->add_option("--out", out_dir, "output directory, overrides the config");
    return sub;
  };
  auto* run = add_experiment("run", "train one network from random init");
  auto* distill = add_experiment("distill", "teacher training plus staged skip removal");
  auto* baseline =
      add_experiment("baseline", "chain from scratch and one-shot removal from a full-skip net");

  auto* hwcompare = app.add_subcommand("hwcompare", "resblock vs nonresblock cost comparison");
  hwcompare->add_option("--config", config_path, "hw calibration and pipelines (JSON)")
      ->required();
  hwcompare->add_option("--mode", mode, "skip handling shown in the table")
      ->check(CLI::IsMember({"stall", "buffer"}));
  hwcompare->add_option("--out", out_dir, "write hwcompare.json and hwcompare.txt here");

  auto* report = app.add_subcommand("report", "aggregate records.json files across seeds");
  report->add_option("--out", out_dir, "directory to scan; summary files are written here")
      ->required();
  report->add_option("--config", config_path, "experiment config supplying reference rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  try {
    if (run->parsed() || distill->parsed() || baseline->parsed()) {
      ExperimentConfig cfg = load_experiment_config(config_path);
      if (seed) cfg.seeds = {*seed};
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      std::vector<SeedRun> runs;
      if (run->parsed()) runs = command_run(cfg, err);
      if (distill->parsed()) runs = command_distill(cfg, err);
      if (baseline->parsed()) runs = command_baseline(cfg, err);
      out << run_summary(runs, cfg.output_dir).dump(2) << "\n";
      return 0;
    }
    if (hwcompare->parsed()) {
      const auto c = load_hwcompare_config(config_path);
      const auto r = compare_blocks(c.res, c.nonres, c.hw);
      const auto text = comparison_table(r, hw::parse_skip_mode(mode), c.reference);
      if (!out_dir.empty()) {
        write_text_file(fs::path(out_dir) / "hwcompare.json",
                        comparison_to_json(r, c.reference).dump(2) + "\n");
        write_text_file(fs::path(out_dir) / "hwcompare.txt", text);
      }
      out << text;
      return 0;
    }
    if (report->parsed()) {
      std::vector<AccuracyReference> reference;
      if (!config_path.empty()) reference = load_experiment_config(config_path).reference;
      const auto rows = summarize(collect_seed_runs(out_dir));
      const auto text = summary_table(rows, reference);
      write_text_file(fs::path(out_dir) / "summary.json",
                      summary_to_json(rows, reference).dump(2) + "\n");
      write_text_file(fs::path(out_dir) / "summary.txt", text);
      out << text;
      return 0;
    }
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what());
    return 1;
  }
  return 1;
}

}  // namespace deskip::cli
