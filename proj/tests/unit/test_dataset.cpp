// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "deskip/checkpoint.hpp"
#include "deskip/dataset.hpp"

namespace deskip {
namespace {

namespace fs = std::filesystem;

// Softmax regression on raw pixels, full-batch gradient descent in double.
double linear_probe_accuracy(const Dataset& d, int steps = 150, double lr = 0.5) {
  const std::size_t k = d.num_classes;
  const std::size_t dim = d.train.images.size() / d.train.size();
  std::vector<double> w(k * dim, 0.0), b(k, 0.0);
  auto logits = [&](const LabeledImages& s, std::size_t i, std::vector<double>& z) {
    const float* x = s.images.raw() + i * dim;
    for (std::size_t c = 0; c < k; ++c) {
      double acc = b[c];
      for (std::size_t j = 0; j < dim; ++j) acc += w[c * dim + j] * x[j];
      z[c] = acc;
    }
  };
  std::vector<double> z(k), gw(k * dim), gb(k);
  const double n = double(d.train.size());
  for (int step = 0; step < steps; ++step) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    for (std::size_t i = 0; i < d.train.size(); ++i) {
      logits(d.train, i, z);
      const double m = *std::max_element(z.begin(), z.end());
      double s = 0.0;
      for (auto& v : z) s += (v = std::exp(v - m));
      const float* x = d.train.images.raw() + i * dim;
      for (std::size_t c = 0; c < k; ++c) {
        const double g = z[c] / s - (std::int32_t(c) == d.train.labels[i] ? 1.0 : 0.0);
        gb[c] += g / n;
        for (std::size_t j = 0; j < dim; ++j) gw[c * dim + j] += g * x[j] / n;
      }
    }
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * gw[i];
    for (std::size_t c = 0; c < k; ++c) b[c] -= lr * gb[c];
  }
  std::size_t right = 0;
  for (std::size_t i = 0; i < d.test.size(); ++i) {
    logits(d.test, i, z);
    right += std::size_t(std::max_element(z.begin(), z.end()) - z.begin()) ==
             std::size_t(d.test.labels[i]);
  }
  return double(right) / double(d.test.size());
}

SyntheticParams probe_params(double difficulty) {
  SyntheticParams p;
  p.classes = 10;
  p.train_per_class = 20;
  p.val_per_class = 5;
  p.test_per_class = 20;
  p.size = 16;
  p.difficulty = difficulty;
  p.seed = 1;
  return p;
}

TEST(Synthetic, ZeroDifficultyIsLinearlySeparable) {
  EXPECT_GE(linear_probe_accuracy(make_synthetic(probe_params(0.0))), 0.95);
}

TEST(Synthetic, ProbeAccuracyFallsWithDifficulty) {
  const double easy = linear_probe_accuracy(make_synthetic(probe_params(0.0)));
  const double hard = linear_probe_accuracy(make_synthetic(probe_params(1.0)));
  EXPECT_LT(hard, easy);
}

TEST(Synthetic, UniformLabelsAndRange) {
  const auto d = make_synthetic(probe_params(0.7));
  for (const auto* s : {&d.train, &d.val, &d.test}) {
    std::vector<std::size_t> hist(10, 0);
    for (auto l : s->labels) ++hist[std::size_t(l)];
    for (auto h : hist) EXPECT_EQ(h, s->size() / 10);
    for (float v : s->images.data()) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
  EXPECT_EQ(d.train.size(), 200u);
  EXPECT_EQ(d.test.size(), 200u);
  EXPECT_NO_THROW(d.validate());
}

TEST(Synthetic, SameSeedSameBytes) {
  const auto a = make_synthetic(probe_params(0.5));
  const auto b = make_synthetic(probe_params(0.5));
  EXPECT_EQ(a.train.images, b.train.images);
  EXPECT_EQ(a.test.images, b.test.images);
  EXPECT_EQ(a.train.labels, b.train.labels);
  auto p = probe_params(0.5);
  p.seed = 2;
  EXPECT_NE(make_synthetic(p).train.images, a.train.images);
}

TEST(Synthetic, InvalidParams) {
  auto p = probe_params(0.5);
  p.classes = 1;
  EXPECT_THROW(make_synthetic(p), DataError);
  p = probe_params(1.5);
  EXPECT_THROW(make_synthetic(p), DataError);
}

TEST(Dataset, NormalizationFromTrainSplit) {
  const auto d = make_synthetic(probe_params(0.5));
  double mean = 0.0;
  for (float v : d.train.images.data()) mean += v;
  mean /= double(d.train.images.size());
  ASSERT_EQ(d.norm.mean.size(), 1u);
  EXPECT_NEAR(d.norm.mean[0], mean, 1e-5);
  std::vector<std::size_t> idx(d.train.size());
  std::iota(idx.begin(), idx.end(), 0);
  const Tensor all = d.batch_images(Split::Train, idx);
  double m2 = 0.0, v2 = 0.0;
  for (float v : all.data()) m2 += v;
  m2 /= double(all.size());
  for (float v : all.data()) v2 += (v - m2) * (v - m2);
  EXPECT_NEAR(m2, 0.0, 1e-4);
  EXPECT_NEAR(v2 / double(all.size()), 1.0, 1e-3);
}

TEST(Cifar, AllZeroRecordDecodes) {
  std::vector<std::uint8_t> rec(kCifarRecordBytes, 0);
  rec[0] = 7;
  const auto out = decode_cifar10(rec);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out.labels[0], 7);
  EXPECT_EQ(out.images, Tensor({1, 3, 32, 32}, 0.0f));
}

TEST(Cifar, TruncationReportsByteOffset) {
  std::vector<std::uint8_t> bytes(2 * kCifarRecordBytes + 100, 0);
  try {
    decode_cifar10(bytes, 1000);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("offset " + std::to_string(1000 + 2 * kCifarRecordBytes)),
              std::string::npos)
        << e.what();
  }
}

TEST(Cifar, BadLabelReportsByteOffset) {
  std::vector<std::uint8_t> bytes(2 * kCifarRecordBytes, 0);
  bytes[kCifarRecordBytes] = 12;
  try {
    decode_cifar10(bytes);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("offset 3073"), std::string::npos) << e.what();
  }
}

std::vector<std::uint8_t> read_all(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

// The fixture was written by tests/fixtures/make_cifar_fixture.py.
TEST(Cifar, GoldenFixtureDecodes) {
  const auto bytes = read_all(fs::path(DESKIP_FIXTURE_DIR) / "cifar_mini" / "data_batch_1.bin");
  ASSERT_EQ(bytes.size(), 20 * kCifarRecordBytes);
  EXPECT_EQ(crc32(bytes), 0xa39e5321u);
  const auto out = decode_cifar10(bytes);
  ASSERT_EQ(out.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(out.labels[i], std::int32_t(i % 10));
    for (std::size_t j : {0ul, 1ul, 1023ul, 1024ul, 2048ul, 3071ul}) {
      const float expected = float((i * 31 + j * 7) % 256) / 255.0f;
      EXPECT_EQ(out.images.raw()[i * 3072 + j], expected);
    }
  }
  std::vector<std::uint8_t> back(out.images.size());
  for (std::size_t i = 0; i < back.size(); ++i)
    back[i] = std::uint8_t(std::lround(out.images.raw()[i] * 255.0f));
  EXPECT_EQ(crc32(back), 0x1888e0d0u);
}

// 1200 records, 120 per class; pixels 0 and 1 encode the record index.
fs::path write_indexed_cifar(const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<std::uint8_t> blob;
  for (std::size_t i = 0; i < 1200; ++i) {
    std::vector<std::uint8_t> rec(kCifarRecordBytes, std::uint8_t(i % 200));
    rec[0] = std::uint8_t(i % 10);
    rec[1] = std::uint8_t(i & 0xff);
    rec[2] = std::uint8_t(i >> 8);
    blob.insert(blob.end(), rec.begin(), rec.end());
  }
  std::ofstream(dir / "data_batch_1.bin", std::ios::binary)
      .write(reinterpret_cast<const char*>(blob.data()), std::streamsize(blob.size()));
  return dir;
}

std::set<int> record_ids(const LabeledImages& s) {
  std::set<int> ids;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const float* img = s.images.raw() + i * 3072;
    ids.insert(int(std::lround(img[0] * 255)) + 256 * int(std::lround(img[1] * 255)));
  }
  return ids;
}

TEST(Cifar, BalancedDisjointDeterministicSubset) {
  const auto dir = write_indexed_cifar(fs::temp_directory_path() / "deskip_cifar_test");
  Cifar10Params p;
  p.path = dir;
  p.max_per_class = 100;
  p.val_per_class = 10;
  p.test_per_class = 10;
  p.seed = 4;
  const auto d = load_cifar10_binary(p);
  EXPECT_EQ(d.train.size(), 1000u);
  std::vector<std::size_t> hist(10, 0);
  for (auto l : d.train.labels) ++hist[std::size_t(l)];
  for (auto h : hist) EXPECT_EQ(h, 100u);
  const auto tr = record_ids(d.train), va = record_ids(d.val), te = record_ids(d.test);
  EXPECT_EQ(tr.size(), 1000u);
  EXPECT_EQ(va.size(), 100u);
  EXPECT_EQ(te.size(), 100u);
  for (int id : va) EXPECT_FALSE(tr.count(id));
  for (int id : te) EXPECT_FALSE(tr.count(id) || va.count(id));
  const auto again = load_cifar10_binary(p);
  EXPECT_EQ(again.train.images, d.train.images);
  p.seed = 5;
  EXPECT_NE(load_cifar10_binary(p).train.images, d.train.images);
  fs::remove_all(dir);
}

TEST(Cifar, MissingPathIsDataError) {
  Cifar10Params p;
  p.path = "/nonexistent/cifar";
  EXPECT_THROW(load_cifar10_binary(p), DataError);
}

}  // namespace
}  // namespace deskip
