// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <optional>

#include "deskip/rng.hpp"

namespace deskip {

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

const LabeledImages& Dataset::split(Split s) const {
  switch (s) {
    case Split::Train: return train;
    case Split::Val: return val;
    case Split::Test: return test;
  }
  return train;
}

void Dataset::compute_normalization() {
  const std::size_t n = train.images.dim(0);
  const std::size_t c = train.images.dim(1);
  const std::size_t hw = train.images.dim(2) * train.images.dim(3);
  norm.mean.assign(c, 0.0f);
  norm.std.assign(c, 1.0f);
  for (std::size_t ch = 0; ch < c; ++ch) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const float* p = train.images.raw() + (i * c + ch) * hw;
      for (std::size_t j = 0; j < hw; ++j) {
        sum += p[j];
        sq += static_cast<double>(p[j]) * p[j];
      }
    }
    const double m = static_cast<double>(n * hw);
    const double mean = sum / m;
    const double var = std::max(sq / m - mean * mean, 0.0);
    norm.mean[ch] = static_cast<float>(mean);
    norm.std[ch] = static_cast<float>(std::max(std::sqrt(var), 1e-6));
  }
}

void Dataset::validate() const {
  if (num_classes < 2) throw DataError("dataset '" + name + "': fewer than 2 classes");
  if (train.size() == 0) throw DataError("dataset '" + name + "': empty training split");
  Shape sample;
  for (Split s : {Split::Train, Split::Val, Split::Test}) {
    const auto& d = split(s);
    if (d.size() == 0) continue;
    if (d.images.rank() != 4 || d.images.dim(0) != d.size()) {
      throw DataError("dataset '" + name + "': " + std::string(to_string(s)) +
                      " images " + shape_to_string(d.images.shape()) + " do not match " +
                      std::to_string(d.size()) + " labels");
    }
    Shape this_sample(d.images.shape().begin() + 1, d.images.shape().end());
    if (sample.empty()) sample = this_sample;
    if (sample != this_sample) {
      throw DataError("dataset '" + name + "': split " + std::string(to_string(s)) +
                      " has sample shape " + shape_to_string(this_sample) +
                      ", expected " + shape_to_string(sample));
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.labels[i] < 0 || static_cast<std::size_t>(d.labels[i]) >= num_classes) {
        throw DataError("dataset '" + name + "': " + std::string(to_string(s)) +
                        " label " + std::to_string(d.labels[i]) + " at index " +
                        std::to_string(i) + " outside [0, " +
                        std::to_string(num_classes) + ")");
      }
    }
  }
  if (norm.mean.size() != channels() || norm.std.size() != channels()) {
    throw DataError("dataset '" + name + "': normalization stats not computed");
  }
}

Tensor Dataset::batch_images(Split s, std::span<const std::size_t> indices) const {
  const auto& d = split(s);
  const std::size_t c = d.images.dim(1);
  const std::size_t hw = d.images.dim(2) * d.images.dim(3);
  Tensor out({indices.size(), c, d.images.dim(2), d.images.dim(3)});
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= d.size()) {
      throw DataError("batch index " + std::to_string(indices[k]) + " outside " +
                      std::string(to_string(s)) + " split of size " +
                      std::to_string(d.size()));
    }
    for (std::size_t ch = 0; ch < c; ++ch) {
      const float* src = d.images.raw() + (indices[k] * c + ch) * hw;
      float* dst = out.raw() + (k * c + ch) * hw;
      const float m = norm.mean[ch];
      const float inv = 1.0f / norm.std[ch];
      for (std::size_t j = 0; j < hw; ++j) dst[j] = (src[j] - m) * inv;
    }
  }
  return out;
}

std::vector<std::int32_t> Dataset::batch_labels(Split s,
                                                std::span<const std::size_t> indices) const {
  const auto& d = split(s);
  std::vector<std::int32_t> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(d.labels.at(i));
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic gratings

namespace {

LabeledImages synth_split(const SyntheticParams& p, std::size_t per_class, Rng rng) {
  const std::size_t n = per_class * p.classes;
  LabeledImages out;
  if (n == 0) return out;
  out.images = Tensor({n, p.channels, p.size, p.size});
  out.labels.resize(n);
  const double pi = std::numbers::pi;
  const double d = p.difficulty;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % p.classes;
    out.labels[i] = static_cast<std::int32_t>(c);
    Rng r = rng.split(i);
    const double theta = pi * static_cast<double>(c) / static_cast<double>(p.classes) +
                         d * 0.6 * (pi / static_cast<double>(p.classes)) * r.normal();
    const double freq = 2.0 + static_cast<double>(c % 3);
    const double phase = d * r.uniform(0.0, 2.0 * pi);
    const double amp = 0.35 * (1.0 - 0.5 * d * r.uniform());
    const double noise = 0.5 * d;
    const double ct = std::cos(theta), st = std::sin(theta);
    for (std::size_t ch = 0; ch < p.channels; ++ch) {
      const double tint = p.channels == 1 ? 1.0 : 0.6 + 0.4 * static_cast<double>((c + ch) % 2);
      float* img = out.images.raw() + (i * p.channels + ch) * p.size * p.size;
      for (std::size_t y = 0; y < p.size; ++y) {
        for (std::size_t x = 0; x < p.size; ++x) {
          const double u = static_cast<double>(x) / static_cast<double>(p.size) - 0.5;
          const double v = static_cast<double>(y) / static_cast<double>(p.size) - 0.5;
          double val = 0.5 + tint * amp * std::sin(2.0 * pi * freq * (u * ct + v * st) + phase);
          if (noise > 0.0) val += noise * r.normal();
          img[y * p.size + x] = static_cast<float>(std::clamp(val, 0.0, 1.0));
        }
      }
    }
  }
  return out;
}

}  // namespace

Dataset make_synthetic(const SyntheticParams& p) {
  if (p.classes < 2) throw DataError("synthetic dataset needs at least 2 classes");
  if (p.size == 0 || p.channels == 0) throw DataError("synthetic image size must be positive");
  if (p.train_per_class == 0) throw DataError("synthetic train_per_class must be positive");
  if (p.difficulty < 0.0 || p.difficulty > 1.0) {
    throw DataError("synthetic difficulty must lie in [0, 1]");
  }
  const Rng root(p.seed);
  Dataset ds;
  ds.name = "synthetic";
  ds.num_classes = p.classes;
  ds.train = synth_split(p, p.train_per_class, root.split("train"));
  ds.val = synth_split(p, p.val_per_class, root.split("val"));
  ds.test = synth_split(p, p.test_per_class, root.split("test"));
  ds.compute_normalization();
  return ds;
}

// ---------------------------------------------------------------------------
// CIFAR-10 binary

LabeledImages decode_cifar10(std::span<const std::uint8_t> bytes, std::size_t file_offset) {
  if (bytes.size() % kCifarRecordBytes != 0) {
    const std::size_t bad = bytes.size() - bytes.size() % kCifarRecordBytes;
    throw DataError("CIFAR-10: truncated record at byte offset " +
                    std::to_string(file_offset + bad) + " (" +
                    std::to_string(bytes.size() - bad) + " of " +
                    std::to_string(kCifarRecordBytes) + " bytes)");
  }
  const std::size_t n = bytes.size() / kCifarRecordBytes;
  LabeledImages out;
  if (n == 0) return out;
  const std::size_t pixels = kCifarRecordBytes - 1;
  out.images = Tensor({n, 3, kCifarSide, kCifarSide});
  out.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t* rec = bytes.data() + i * kCifarRecordBytes;
    if (rec[0] >= kCifarClasses) {
      throw DataError("CIFAR-10: malformed record at byte offset " +
                      std::to_string(file_offset + i * kCifarRecordBytes) + ": label " +
                      std::to_string(rec[0]) + " outside [0, 9]");
    }
    out.labels[i] = rec[0];
    float* dst = out.images.raw() + i * pixels;
    // Records are channel-planar R, G, B: already CHW.
    for (std::size_t j = 0; j < pixels; ++j) dst[j] = static_cast<float>(rec[1 + j]) / 255.0f;
  }
  return out;
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

struct RawRecords {
  std::vector<std::uint8_t> bytes;
  std::vector<std::uint8_t> labels;
};

RawRecords read_records(const std::vector<std::filesystem::path>& files) {
  RawRecords r;
  for (const auto& f : files) {
    auto b = read_file(f);
    try {
      decode_cifar10(b);  // validates framing and labels
    } catch (const DataError& e) {
      throw DataError(f.string() + ": " + e.what());
    }
    for (std::size_t off = 0; off < b.size(); off += kCifarRecordBytes) r.labels.push_back(b[off]);
    r.bytes.insert(r.bytes.end(), b.begin(), b.end());
  }
  return r;
}

// Walks a seeded permutation and hands out records per class.
class BalancedPicker {
 public:
  BalancedPicker(const RawRecords& r, Rng rng) : records_(r) {
    order_.resize(r.labels.size());
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    rng.shuffle(order_.begin(), order_.end());
    taken_.assign(order_.size(), false);
  }

  std::vector<std::size_t> take(std::size_t per_class) {
    std::vector<std::size_t> counts(kCifarClasses, 0), out;
    for (std::size_t idx : order_) {
      if (taken_[idx]) continue;
      const std::size_t c = records_.labels[idx];
      if (counts[c] >= per_class) continue;
      ++counts[c];
      taken_[idx] = true;
      out.push_back(idx);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  const RawRecords& records_;
  std::vector<std::size_t> order_;
  std::vector<bool> taken_;
};

LabeledImages gather(const RawRecords& r, const std::vector<std::size_t>& idx) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(idx.size() * kCifarRecordBytes);
  for (std::size_t i : idx) {
    const auto* rec = r.bytes.data() + i * kCifarRecordBytes;
    bytes.insert(bytes.end(), rec, rec + kCifarRecordBytes);
  }
  return decode_cifar10(bytes);
}

}  // namespace

Dataset load_cifar10_binary(const Cifar10Params& p) {
  namespace fs = std::filesystem;
  if (p.max_per_class == 0) throw DataError("CIFAR-10: max_per_class must be positive");
  std::vector<fs::path> train_files;
  std::optional<fs::path> test_file;
  if (fs::is_directory(p.path)) {
    for (int i = 1; i <= 5; ++i) {
      const auto f = p.path / ("data_batch_" + std::to_string(i) + ".bin");
      if (fs::exists(f)) train_files.push_back(f);
    }
    if (fs::exists(p.path / "test_batch.bin")) test_file = p.path / "test_batch.bin";
    if (train_files.empty()) {
      throw DataError("CIFAR-10: no data_batch_*.bin files in '" + p.path.string() + "'");
    }
  } else if (fs::exists(p.path)) {
    train_files.push_back(p.path);
  } else {
    throw DataError("CIFAR-10: path '" + p.path.string() + "' does not exist");
  }

  const Rng root(p.seed);
  const RawRecords train_raw = read_records(train_files);
  BalancedPicker picker(train_raw, root.split("cifar10-train"));

  Dataset ds;
  ds.name = "cifar10";
  ds.num_classes = kCifarClasses;
  ds.train = gather(train_raw, picker.take(p.max_per_class));
  ds.val = gather(train_raw, picker.take(p.val_per_class));
  if (test_file) {
    const RawRecords test_raw = read_records({*test_file});
    BalancedPicker test_picker(test_raw, root.split("cifar10-test"));
    ds.test = gather(test_raw, test_picker.take(p.test_per_class));
  } else {
    ds.test = gather(train_raw, picker.take(p.test_per_class));
  }
  if (ds.train.size() == 0) throw DataError("CIFAR-10: no training records found");
  ds.compute_normalization();
  return ds;
}

}  // namespace deskip
