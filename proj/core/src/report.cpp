// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace deskip {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string signed_fixed(double v, int digits) {
  return (v >= 0 ? "+" : "") + fixed(v, digits);
}

// Left-aligned first column, right-aligned others.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  std::string out;
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const auto& r = rows[ri];
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::string pad(width[i] - r[i].size(), ' ');
      line += i == 0 ? r[i] + pad : "  " + pad + r[i];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (ri == 0) {
      std::size_t total = 0;
      for (std::size_t i = 0; i < width.size(); ++i) total += width[i] + (i ? 2 : 0);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

bool all_kind(const std::vector<SkipKind>& mask, SkipKind k) {
  return !mask.empty() && std::all_of(mask.begin(), mask.end(), [k](SkipKind m) { return m == k; });
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const RunRecord& r) {
  json mask = json::array();
  for (auto k : r.skip_mask) mask.push_back(std::string(to_string(k)));
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"lr", e.lr},
                      {"train_loss", opt(e.train_loss)},
                      {"train_accuracy", opt(e.train_accuracy)},
                      {"val_loss", opt(e.val_loss)},
                      {"val_accuracy", opt(e.val_accuracy)}});
  }
  return {{"label", r.label},
          {"stage", r.stage},
          {"skip_mask", mask},
          {"fork_join_pairs", r.fork_join_pairs()},
          {"epochs", epochs},
          {"best_epoch", r.best_epoch},
          {"best_val_accuracy", r.best_val_accuracy},
          {"test_loss", r.test_loss},
          {"test_accuracy", r.test_accuracy},
          {"entry_checksum", r.entry_checksum},
          {"checkpoint_checksum", r.checkpoint_checksum},
          {"checkpoint_path", r.checkpoint_path},
          {"diverged", r.diverged},
          {"diagnostic", r.diagnostic}};
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  try {
    r.label = j.at("label").get<std::string>();
    r.stage = j.at("stage").get<std::size_t>();
    for (const auto& k : j.at("skip_mask")) r.skip_mask.push_back(parse_skip_kind(k.get<std::string>()));
    for (const auto& e : j.at("epochs")) {
      EpochMetrics m;
      m.epoch = e.at("epoch").get<std::size_t>();
      m.lr = e.at("lr").get<double>();
      m.train_loss = opt_from(e, "train_loss");
      m.train_accuracy = opt_from(e, "train_accuracy");
      m.val_loss = opt_from(e, "val_loss");
      m.val_accuracy = opt_from(e, "val_accuracy");
      r.epochs.push_back(m);
    }
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.best_val_accuracy = j.at("best_val_accuracy").get<double>();
    r.test_loss = j.at("test_loss").get<double>();
    r.test_accuracy = j.at("test_accuracy").get<double>();
    r.entry_checksum = j.at("entry_checksum").get<std::uint32_t>();
    r.checkpoint_checksum = j.at("checkpoint_checksum").get<std::uint32_t>();
    r.checkpoint_path = j.at("checkpoint_path").get<std::string>();
    r.diverged = j.at("diverged").get<bool>();
    r.diagnostic = j.at("diagnostic").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed run record: ") + e.what());
  }
  return r;
}

std::string metrics_csv(const std::vector<RunRecord>& records) {
  std::string out = "label,stage,epoch,split,loss,accuracy\n";
  auto row = [&](const RunRecord& r, std::size_t epoch, const char* split, double loss,
                 double acc) {
    out += r.label + "," + std::to_string(r.stage) + "," + std::to_string(epoch) + "," + split +
           "," + format_number(loss) + "," + format_number(acc) + "\n";
  };
  for (const auto& r : records) {
    for (const auto& e : r.epochs) {
      if (e.train_loss) row(r, e.epoch, "train", *e.train_loss, e.train_accuracy.value_or(0.0));
      if (e.val_loss) row(r, e.epoch, "val", *e.val_loss, e.val_accuracy.value_or(0.0));
    }
    if (!r.diverged) row(r, r.best_epoch, "test", r.test_loss, r.test_accuracy);
  }
  return out;
}

json to_json(const SeedRun& run) {
  json records = json::array();
  for (const auto& r : run.records) records.push_back(to_json(r));
  return {{"command", run.command},
          {"dataset", run.dataset},
          {"seed", run.seed},
          {"records", records}};
}

SeedRun seed_run_from_json(const json& j) {
  SeedRun s;
  try {
    s.command = j.at("command").get<std::string>();
    s.dataset = j.at("dataset").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& r : j.at("records")) s.records.push_back(record_from_json(r));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed records file: ") + e.what());
  }
  return s;
}

std::string variant_of(const RunRecord& r) {
  std::string topology = "mixed-skip";
  if (all_kind(r.skip_mask, SkipKind::Full)) topology = "full-skip";
  if (all_kind(r.skip_mask, SkipKind::Short)) topology = "short-skip";
  if (all_kind(r.skip_mask, SkipKind::None)) topology = "no-skip";
  if (r.label == "teacher" || r.label == "full_teacher") return topology + " teacher";
  if (r.label == "scratch") return "no-skip (scratch)";
  if (r.label == "direct") return "no-skip (direct from full)";
  if (r.label == "run") return topology + " (run)";
  if (r.label.rfind("stage", 0) == 0) {
    return topology == "no-skip" ? "no-skip (staged)" : r.label;
  }
  return r.label;
}

std::vector<SummaryRow> summarize(const std::vector<SeedRun>& runs) {
  std::vector<SummaryRow> rows;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& run : runs) {
    for (const auto& r : run.records) {
      if (r.diverged) continue;
      const auto key = std::make_pair(run.dataset, variant_of(r));
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, rows.size()).first;
        rows.push_back({key.first, key.second, {}, {}, 0.0, 0.0, 0.0});
      }
      rows[it->second].seeds.push_back(run.seed);
      rows[it->second].accuracies.push_back(100.0 * r.test_accuracy);
    }
  }
  for (auto& row : rows) {
    double sum = 0.0;
    for (double a : row.accuracies) sum += a;
    row.mean = sum / static_cast<double>(row.accuracies.size());
    row.min = *std::min_element(row.accuracies.begin(), row.accuracies.end());
    row.max = *std::max_element(row.accuracies.begin(), row.accuracies.end());
  }
  return rows;
}

std::vector<SeedRun> collect_seed_runs(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().filename() == "records.json") files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<SeedRun> runs;
  for (const auto& f : files) runs.push_back(seed_run_from_json(read_json_file(f)));
  return runs;
}

json summary_to_json(const std::vector<SummaryRow>& rows,
                     const std::vector<AccuracyReference>& reference) {
  json measured = json::array();
  for (const auto& r : rows) {
    measured.push_back({{"dataset", r.dataset},
                        {"variant", r.variant},
                        {"seeds", r.seeds},
                        {"test_accuracy", r.accuracies},
                        {"mean", r.mean},
                        {"min", r.min},
                        {"max", r.max}});
  }
  json ref = json::array();
  for (const auto& a : reference) {
    ref.push_back({{"dataset", a.dataset}, {"variant", a.variant}, {"accuracy", a.accuracy}});
  }
  return {{"measured", measured}, {"reference", ref}};
}

std::string summary_table(const std::vector<SummaryRow>& rows,
                          const std::vector<AccuracyReference>& reference) {
  std::string out = "Test accuracy (%), mean [min, max] over seeds\n";
  std::vector<std::vector<std::string>> t{{"Dataset", "Variant", "Seeds", "Mean", "Range"}};
  for (const auto& r : rows) {
    t.push_back({r.dataset, r.variant, std::to_string(r.seeds.size()), fixed(r.mean, 2),
                 "[" + fixed(r.min, 2) + ", " + fixed(r.max, 2) + "]"});
  }
  if (rows.empty()) t.push_back({"(no records)"});
  out += render_table(t);
  if (!reference.empty()) {
    out += "\nReference values (published, full scale; not measured here)\n";
    std::vector<std::vector<std::string>> rt{{"Dataset", "Variant", "Accuracy"}};
    for (const auto& a : reference) rt.push_back({a.dataset, a.variant, fixed(a.accuracy, 2)});
    out += render_table(rt);
  }
  return out;
}

namespace {

json estimate_json(const hw::ResourceEstimate& e) {
  return {{"throughput_fps", e.throughput_fps},
          {"throughput_khz", e.throughput_fps / 1000.0},
          {"period_cycles", e.period_cycles},
          {"bram_count", e.bram_count},
          {"lut_count", e.lut_count},
          {"ff_count", e.ff_count},
          {"bram_percent", e.bram_percent},
          {"lut_percent", e.lut_percent},
          {"ff_percent", e.ff_percent},
          {"breakdown",
           {{"weight_bits", e.weight_bits},
            {"fifo_bits", e.fifo_bits},
            {"skip_bits", e.skip_bits},
            {"bram_weights", e.bram_weights},
            {"bram_fifos", e.bram_fifos},
            {"bram_skip", e.bram_skip},
            {"lut_join", e.lut_join},
            {"ff_join", e.ff_join}}}};
}

json mode_json(const hw::ModeComparison& m) {
  return {{"mode", hw::to_string(m.mode)},
          {"res", estimate_json(m.res)},
          {"nonres", estimate_json(m.nonres)},
          {"throughput_ratio", m.throughput_ratio},
          {"throughput_change_percent", m.throughput_change_percent},
          {"bram_delta", m.bram_delta},
          {"lut_delta", m.lut_delta},
          {"ff_delta", m.ff_delta},
          {"bram_change_percent", m.bram_change_percent},
          {"lut_change_percent", m.lut_change_percent},
          {"ff_change_percent", m.ff_change_percent},
          {"bram_point_delta", m.bram_point_delta},
          {"lut_point_delta", m.lut_point_delta},
          {"ff_point_delta", m.ff_point_delta}};
}

}  // namespace

json comparison_to_json(const hw::ComparisonReport& report,
                        const std::vector<HwReferenceRow>& reference) {
  json ref = json::array();
  for (const auto& r : reference) {
    ref.push_back({{"design", r.design},
                   {"throughput_khz", r.throughput_khz},
                   {"ff_percent", r.ff_percent},
                   {"lut_percent", r.lut_percent},
                   {"bram_percent", r.bram_percent}});
  }
  return {{"res_name", report.res_name},
          {"nonres_name", report.nonres_name},
          {"stall", mode_json(report.stall)},
          {"buffer", mode_json(report.buffer)},
          {"reference", ref}};
}

std::string comparison_table(const hw::ComparisonReport& report, hw::SkipMode mode,
                             const std::vector<HwReferenceRow>& reference) {
  const auto& m = mode == hw::SkipMode::Stall ? report.stall : report.buffer;
  std::string out = "Skip handling: " + hw::to_string(mode) + "\n";
  std::vector<std::vector<std::string>> t{
      {"Design", "Throughput (kHz)", "FF (%)", "LUT (%)", "BRAM (%)"}};
  auto add = [&](const std::string& name, const hw::ResourceEstimate& e) {
    t.push_back({name, fixed(e.throughput_fps / 1000.0, 3), fixed(e.ff_percent, 2),
                 fixed(e.lut_percent, 2), fixed(e.bram_percent, 2)});
  };
  add(report.res_name, m.res);
  add(report.nonres_name, m.nonres);
  for (const auto& r : reference) {
    t.push_back({r.design + " [reference]", fixed(r.throughput_khz, 3), fixed(r.ff_percent, 2),
                 fixed(r.lut_percent, 2), fixed(r.bram_percent, 2)});
  }
  out += render_table(t);
  out += "\nres -> nonres (model)\n";
  std::vector<std::vector<std::string>> d{
      {"Quantity", "Count delta", "Relative change (%)", "Utilization delta (points)"}};
  d.push_back({"Throughput", "-", signed_fixed(m.throughput_change_percent, 2), "-"});
  d.push_back({"FF", std::to_string(m.ff_delta), signed_fixed(m.ff_change_percent, 2),
               signed_fixed(m.ff_point_delta, 3)});
  d.push_back({"LUT", std::to_string(m.lut_delta), signed_fixed(m.lut_change_percent, 2),
               signed_fixed(m.lut_point_delta, 3)});
  d.push_back({"BRAM", std::to_string(m.bram_delta), signed_fixed(m.bram_change_percent, 2),
               signed_fixed(m.bram_point_delta, 3)});
  out += render_table(d);
  if (reference.size() >= 2) {
    const auto& a = reference[0];
    const auto& b = reference[1];
    auto rel = [](double from, double to) { return from == 0.0 ? 0.0 : 100.0 * (to - from) / from; };
    out += "\n" + a.design + " -> " + b.design + " [reference]\n";
    std::vector<std::vector<std::string>> rd{
        {"Quantity", "Relative change (%)", "Utilization delta (points)"}};
    rd.push_back({"Throughput", signed_fixed(rel(a.throughput_khz, b.throughput_khz), 2), "-"});
    rd.push_back({"FF", signed_fixed(rel(a.ff_percent, b.ff_percent), 2),
                  signed_fixed(b.ff_percent - a.ff_percent, 3)});
    rd.push_back({"LUT", signed_fixed(rel(a.lut_percent, b.lut_percent), 2),
                  signed_fixed(b.lut_percent - a.lut_percent, 3)});
    rd.push_back({"BRAM", signed_fixed(rel(a.bram_percent, b.bram_percent), 2),
                  signed_fixed(b.bram_percent - a.bram_percent, 3)});
    out += render_table(rd);
  }
  return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace deskip
