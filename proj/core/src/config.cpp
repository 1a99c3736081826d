// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace deskip {

using nlohmann::json;

namespace {

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(where() + "expected an object");
  }

  std::string sub(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  const json* find(std::string_view key) {
    seen_.emplace(key);
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  const json& require(std::string_view key) {
    const json* v = find(key);
    if (!v) throw ConfigError(sub(key) + ": required key missing");
    return *v;
  }

  std::uint64_t u64(std::string_view key, std::uint64_t def) {
    const json* v = find(key);
    return v ? as_u64(*v, sub(key)) : def;
  }
  double number(std::string_view key, double def) {
    const json* v = find(key);
    return v ? as_double(*v, sub(key)) : def;
  }
  std::string string(std::string_view key, std::string def) {
    const json* v = find(key);
    return v ? as_string(*v, sub(key)) : def;
  }

  void finish() const {
    std::vector<std::string> unknown;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) unknown.push_back(sub(it.key()));
    }
    if (unknown.empty()) return;
    std::string msg = "unknown key";
    msg += unknown.size() > 1 ? "s " : " ";
    for (std::size_t i = 0; i < unknown.size(); ++i) {
      msg += (i ? ", '" : "'") + unknown[i] + "'";
    }
    throw ConfigError(msg);
  }

  static std::uint64_t as_u64(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(path + ": expected a nonnegative integer");
  }
  static double as_double(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path + ": expected a number");
    return v.get<double>();
  }
  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path + ": expected a string");
    return v.get<std::string>();
  }

 private:
  std::string where() const { return path_.empty() ? "" : path_ + ": "; }

  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

const json& require_array(const json& v, const std::string& path) {
  if (!v.is_array()) throw ConfigError(path + ": expected an array");
  return v;
}

std::string idx(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

// Parser helpers throw ConfigError with bare messages; prefix them with the
// key that carried the bad value.
template <typename F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

NetSpec parse_net(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  NetSpec s;
  s.n = r.u64("n", 3);
  if (const json* w = r.find("widths")) {
    require_array(*w, r.sub("widths"));
    if (w->size() != 3) throw ConfigError(r.sub("widths") + ": expected 3 entries");
    for (std::size_t i = 0; i < 3; ++i) {
      s.widths[i] = ObjectReader::as_u64((*w)[i], idx(r.sub("widths"), i));
    }
  }
  s.num_classes = r.u64("num_classes", 0);
  s.in_channels = r.u64("in_channels", 0);
  const json* uniform = r.find("skip");
  const json* kinds = r.find("skip_kinds");
  if (uniform && kinds) {
    throw ConfigError(path + ": 'skip' and 'skip_kinds' are mutually exclusive");
  }
  if (kinds) {
    require_array(*kinds, r.sub("skip_kinds"));
    for (std::size_t i = 0; i < kinds->size(); ++i) {
      const auto p = idx(r.sub("skip_kinds"), i);
      const auto text = ObjectReader::as_string((*kinds)[i], p);
      s.skip_kinds.push_back(with_path(p, [&] { return parse_skip_kind(text); }));
    }
  } else {
    const auto text = uniform ? ObjectReader::as_string(*uniform, r.sub("skip")) : "short";
    const auto k = with_path(r.sub("skip"), [&] { return parse_skip_kind(text); });
    s.skip_kinds.assign(3 * s.n, k);
  }
  const auto span = r.string("short_span", "second");
  s.short_span = with_path(r.sub("short_span"), [&] { return parse_short_span(span); });
  const auto join = r.string("short_join", "add_then_relu");
  s.short_join = with_path(r.sub("short_join"), [&] { return parse_join_order(join); });
  r.finish();
  return s;
}

TrainConfig parse_train(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  TrainConfig t;
  t.epochs = r.u64("epochs", t.epochs);
  t.batch_size = r.u64("batch_size", t.batch_size);
  t.lr = r.number("lr", t.lr);
  if (const json* steps = r.find("lr_steps")) {
    require_array(*steps, r.sub("lr_steps"));
    for (std::size_t i = 0; i < steps->size(); ++i) {
      ObjectReader sr((*steps)[i], idx(r.sub("lr_steps"), i));
      LrStep st;
      st.epoch = ObjectReader::as_u64(sr.require("epoch"), sr.sub("epoch"));
      st.lr = ObjectReader::as_double(sr.require("lr"), sr.sub("lr"));
      sr.finish();
      t.lr_steps.push_back(st);
    }
  }
  t.momentum = r.number("momentum", t.momentum);
  t.weight_decay = r.number("weight_decay", t.weight_decay);
  t.eval_every = r.u64("eval_every", t.eval_every);
  t.eval_batch_size = r.u64("eval_batch_size", t.eval_batch_size);
  r.finish();
  with_path(path, [&] { t.validate(); return 0; });
  return t;
}

DatasetSource parse_dataset(const json& j, const std::string& path,
                            const std::filesystem::path& base_dir) {
  ObjectReader r(j, path);
  DatasetSource d;
  const auto kind = ObjectReader::as_string(r.require("kind"), r.sub("kind"));
  if (kind == "synthetic") {
    d.kind = DatasetSource::Kind::Synthetic;
    auto& s = d.synthetic;
    s.classes = r.u64("classes", s.classes);
    s.train_per_class = r.u64("train_per_class", s.train_per_class);
    s.val_per_class = r.u64("val_per_class", s.val_per_class);
    s.test_per_class = r.u64("test_per_class", s.test_per_class);
    s.size = r.u64("size", s.size);
    s.channels = r.u64("channels", s.channels);
    s.difficulty = r.number("difficulty", s.difficulty);
    s.seed = r.u64("seed", s.seed);
    if (s.classes < 2) throw ConfigError(r.sub("classes") + ": must be >= 2");
    if (s.difficulty < 0.0 || s.difficulty > 1.0) {
      throw ConfigError(r.sub("difficulty") + ": must lie in [0, 1]");
    }
  } else if (kind == "cifar10") {
    d.kind = DatasetSource::Kind::Cifar10;
    auto& c = d.cifar;
    std::filesystem::path p = ObjectReader::as_string(r.require("path"), r.sub("path"));
    c.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    c.max_per_class = r.u64("max_per_class", c.max_per_class);
    c.val_per_class = r.u64("val_per_class", c.val_per_class);
    c.test_per_class = r.u64("test_per_class", c.test_per_class);
    c.seed = r.u64("seed", c.seed);
  } else {
    throw ConfigError(r.sub("kind") + ": unknown dataset kind '" + kind +
                      "' (expected synthetic or cifar10)");
  }
  r.finish();
  return d;
}

json net_to_json(const NetSpec& s) {
  json kinds = json::array();
  for (auto k : s.skip_kinds) kinds.push_back(std::string(to_string(k)));
  return {{"n", s.n},
          {"widths", s.widths},
          {"num_classes", s.num_classes},
          {"in_channels", s.in_channels},
          {"skip_kinds", kinds},
          {"short_span", std::string(to_string(s.short_span))},
          {"short_join", std::string(to_string(s.short_join))}};
}

json train_to_json(const TrainConfig& t) {
  json steps = json::array();
  for (const auto& s : t.lr_steps) steps.push_back({{"epoch", s.epoch}, {"lr", s.lr}});
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"lr", t.lr},
          {"lr_steps", steps},
          {"momentum", t.momentum},
          {"weight_decay", t.weight_decay},
          {"eval_every", t.eval_every},
          {"eval_batch_size", t.eval_batch_size}};
}

json dataset_to_json(const DatasetSource& d) {
  if (d.kind == DatasetSource::Kind::Synthetic) {
    const auto& s = d.synthetic;
    return {{"kind", "synthetic"},
            {"classes", s.classes},
            {"train_per_class", s.train_per_class},
            {"val_per_class", s.val_per_class},
            {"test_per_class", s.test_per_class},
            {"size", s.size},
            {"channels", s.channels},
            {"difficulty", s.difficulty},
            {"seed", s.seed}};
  }
  const auto& c = d.cifar;
  return {{"kind", "cifar10"},
          {"path", c.path.generic_string()},
          {"max_per_class", c.max_per_class},
          {"val_per_class", c.val_per_class},
          {"test_per_class", c.test_per_class},
          {"seed", c.seed}};
}

}  // namespace

std::string DatasetSource::name() const {
  return kind == Kind::Synthetic ? "synthetic" : "cifar10";
}

std::size_t DatasetSource::num_classes() const {
  return kind == Kind::Synthetic ? synthetic.classes : kCifarClasses;
}

std::size_t DatasetSource::channels() const {
  return kind == Kind::Synthetic ? synthetic.channels : 3;
}

Dataset DatasetSource::load() const {
  return kind == Kind::Synthetic ? make_synthetic(synthetic) : load_cifar10_binary(cifar);
}

ExperimentConfig parse_experiment_config(const json& j, const std::filesystem::path& base_dir) {
  ObjectReader r(j, "");
  ExperimentConfig c;
  c.name = r.string("name", "experiment");
  c.dataset = parse_dataset(r.require("dataset"), "dataset", base_dir);
  c.net = parse_net(r.require("net"), "net");
  if (c.net.num_classes == 0) c.net.num_classes = c.dataset.num_classes();
  if (c.net.in_channels == 0) c.net.in_channels = c.dataset.channels();
  if (c.net.num_classes != c.dataset.num_classes()) {
    throw ConfigError("net.num_classes: " + std::to_string(c.net.num_classes) +
                      " does not match the dataset's " +
                      std::to_string(c.dataset.num_classes()) + " classes");
  }
  if (c.net.in_channels != c.dataset.channels()) {
    throw ConfigError("net.in_channels: " + std::to_string(c.net.in_channels) +
                      " does not match the dataset's " + std::to_string(c.dataset.channels()) +
                      " channels");
  }
  with_path("net", [&] { c.net.validate(); return 0; });
  if (const json* t = r.find("train")) c.train = parse_train(*t, "train");

  c.schedule.total_skips = c.net.num_blocks();
  c.schedule.group_size = std::min<std::size_t>(3, c.schedule.total_skips);
  if (const json* s = r.find("schedule")) {
    ObjectReader sr(*s, "schedule");
    const auto total = sr.u64("total_skips", c.schedule.total_skips);
    if (total != c.net.num_blocks()) {
      throw ConfigError("schedule.total_skips: " + std::to_string(total) +
                        " but the network has " + std::to_string(c.net.num_blocks()) +
                        " blocks");
    }
    c.schedule.group_size = sr.u64("group_size", c.schedule.group_size);
    sr.finish();
  }
  with_path("schedule", [&] { c.schedule.validate(); return 0; });

  if (const json* s = r.find("seeds")) {
    require_array(*s, "seeds");
    if (s->empty()) throw ConfigError("seeds: must not be empty");
    c.seeds.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      c.seeds.push_back(ObjectReader::as_u64((*s)[i], idx("seeds", i)));
    }
  }
  c.output_dir = r.string("output_dir", c.output_dir.string());
  if (const json* ref = r.find("reference")) {
    require_array(*ref, "reference");
    for (std::size_t i = 0; i < ref->size(); ++i) {
      ObjectReader rr((*ref)[i], idx("reference", i));
      AccuracyReference a;
      a.dataset = ObjectReader::as_string(rr.require("dataset"), rr.sub("dataset"));
      a.variant = ObjectReader::as_string(rr.require("variant"), rr.sub("variant"));
      a.accuracy = ObjectReader::as_double(rr.require("accuracy"), rr.sub("accuracy"));
      rr.finish();
      c.reference.push_back(a);
    }
  }
  r.finish();
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_json_file(path), path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json seeds = json::array();
  for (auto s : c.seeds) seeds.push_back(s);
  json out = {{"name", c.name},
              {"net", net_to_json(c.net)},
              {"train", train_to_json(c.train)},
              {"schedule",
               {{"total_skips", c.schedule.total_skips}, {"group_size", c.schedule.group_size}}},
              {"dataset", dataset_to_json(c.dataset)},
              {"seeds", seeds},
              {"output_dir", c.output_dir.generic_string()}};
  if (!c.reference.empty()) {
    json ref = json::array();
    for (const auto& a : c.reference) {
      ref.push_back({{"dataset", a.dataset}, {"variant", a.variant}, {"accuracy", a.accuracy}});
    }
    out["reference"] = ref;
  }
  return out;
}

// ---------------------------------------------------------------------------
// hardware model documents

hw::HwConfig parse_hw_config(const json& j) {
  ObjectReader r(j, "hw");
  hw::HwConfig c;
  c.clock_hz = r.number("clock_hz", c.clock_hz);
  c.weight_bits = static_cast<std::uint32_t>(r.u64("weight_bits", c.weight_bits));
  c.act_bits = static_cast<std::uint32_t>(r.u64("act_bits", c.act_bits));
  c.bram_capacity_bits = r.u64("bram_capacity_bits", c.bram_capacity_bits);
  c.luts_total = r.u64("luts_total", c.luts_total);
  c.ffs_total = r.u64("ffs_total", c.ffs_total);
  c.brams_total = r.u64("brams_total", c.brams_total);
  c.fifo_depth_pixels = r.u64("fifo_depth_pixels", c.fifo_depth_pixels);
  c.join_overhead_cycles_per_row =
      r.u64("join_overhead_cycles_per_row", c.join_overhead_cycles_per_row);
  if (const json* l = r.find("lut")) {
    ObjectReader lr(*l, "hw.lut");
    c.lut.per_mac_bit = lr.u64("per_mac_bit", c.lut.per_mac_bit);
    c.lut.per_stage = lr.u64("per_stage", c.lut.per_stage);
    c.lut.per_join_lane_bit = lr.u64("per_join_lane_bit", c.lut.per_join_lane_bit);
    lr.finish();
  }
  if (const json* f = r.find("ff")) {
    ObjectReader fr(*f, "hw.ff");
    c.ff.per_lane_bit = fr.u64("per_lane_bit", c.ff.per_lane_bit);
    c.ff.per_stage = fr.u64("per_stage", c.ff.per_stage);
    c.ff.per_join_lane_bit = fr.u64("per_join_lane_bit", c.ff.per_join_lane_bit);
    fr.finish();
  }
  r.finish();
  c.validate();
  return c;
}

hw::BlockPipeline parse_pipeline(const json& j) {
  ObjectReader r(j, "pipeline");
  hw::BlockPipeline p;
  p.name = r.string("name", "block");
  const json& stages = require_array(r.require("stages"), "pipeline.stages");
  for (std::size_t i = 0; i < stages.size(); ++i) {
    ObjectReader sr(stages[i], idx("pipeline.stages", i));
    hw::StageSpec s;
    s.name = sr.string("name", "stage" + std::to_string(i));
    s.in_channels = ObjectReader::as_u64(sr.require("in_channels"), sr.sub("in_channels"));
    s.height = ObjectReader::as_u64(sr.require("height"), sr.sub("height"));
    s.width = ObjectReader::as_u64(sr.require("width"), sr.sub("width"));
    s.out_channels = ObjectReader::as_u64(sr.require("out_channels"), sr.sub("out_channels"));
    s.kernel = sr.u64("kernel", s.kernel);
    s.stride = sr.u64("stride", s.stride);
    s.pe = sr.u64("pe", s.pe);
    s.simd = sr.u64("simd", s.simd);
    sr.finish();
    p.stages.push_back(s);
  }
  if (const json* sk = r.find("skip")) {
    if (!sk->is_null()) {
      ObjectReader kr(*sk, "pipeline.skip");
      hw::SkipEdge e;
      e.fork = ObjectReader::as_u64(kr.require("fork"), kr.sub("fork"));
      e.join = ObjectReader::as_u64(kr.require("join"), kr.sub("join"));
      kr.finish();
      p.skip = e;
    }
  }
  r.finish();
  p.validate();
  return p;
}

HwCompareConfig parse_hwcompare_config(const json& j) {
  ObjectReader r(j, "");
  HwCompareConfig c;
  c.hw = parse_hw_config(r.require("hw"));
  c.res = parse_pipeline(r.require("resblock"));
  if (const json* n = r.find("nonresblock")) {
    c.nonres = parse_pipeline(*n);
  } else {
    c.nonres = c.res.without_skip();
    c.nonres.name = c.res.name + " (no skip)";
  }
  if (const json* ref = r.find("reference")) {
    require_array(*ref, "reference");
    for (std::size_t i = 0; i < ref->size(); ++i) {
      ObjectReader rr((*ref)[i], idx("reference", i));
      HwReferenceRow row;
      row.design = ObjectReader::as_string(rr.require("design"), rr.sub("design"));
      row.throughput_khz =
          ObjectReader::as_double(rr.require("throughput_khz"), rr.sub("throughput_khz"));
      row.ff_percent = ObjectReader::as_double(rr.require("ff_percent"), rr.sub("ff_percent"));
      row.lut_percent =
          ObjectReader::as_double(rr.require("lut_percent"), rr.sub("lut_percent"));
      row.bram_percent =
          ObjectReader::as_double(rr.require("bram_percent"), rr.sub("bram_percent"));
      rr.finish();
      c.reference.push_back(row);
    }
  }
  r.find("notes");  // free-form documentation, ignored
  r.finish();
  return c;
}

HwCompareConfig load_hwcompare_config(const std::filesystem::path& path) {
  return parse_hwcompare_config(read_json_file(path));
}

json to_json(const hw::HwConfig& c) {
  return {{"clock_hz", c.clock_hz},
          {"weight_bits", c.weight_bits},
          {"act_bits", c.act_bits},
          {"bram_capacity_bits", c.bram_capacity_bits},
          {"luts_total", c.luts_total},
          {"ffs_total", c.ffs_total},
          {"brams_total", c.brams_total},
          {"fifo_depth_pixels", c.fifo_depth_pixels},
          {"join_overhead_cycles_per_row", c.join_overhead_cycles_per_row},
          {"lut",
           {{"per_mac_bit", c.lut.per_mac_bit},
            {"per_stage", c.lut.per_stage},
            {"per_join_lane_bit", c.lut.per_join_lane_bit}}},
          {"ff",
           {{"per_lane_bit", c.ff.per_lane_bit},
            {"per_stage", c.ff.per_stage},
            {"per_join_lane_bit", c.ff.per_join_lane_bit}}}};
}

json to_json(const hw::BlockPipeline& p) {
  json stages = json::array();
  for (const auto& s : p.stages) {
    stages.push_back({{"name", s.name},
                      {"in_channels", s.in_channels},
                      {"height", s.height},
                      {"width", s.width},
                      {"out_channels", s.out_channels},
                      {"kernel", s.kernel},
                      {"stride", s.stride},
                      {"pe", s.pe},
                      {"simd", s.simd}});
  }
  json out = {{"name", p.name}, {"stages", stages}};
  out["skip"] = p.skip ? json{{"fork", p.skip->fork}, {"join", p.skip->join}} : json(nullptr);
  return out;
}

}  // namespace deskip
