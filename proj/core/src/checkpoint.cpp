// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

namespace deskip {

namespace {

constexpr char kMagic[4] = {'N', 'R', 'C', 'K'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    buf_.insert(buf_.end(), b, b + n);
  }
  template <typename U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }
  void f32(float f) { le(std::bit_cast<std::uint32_t>(f)); }
  std::vector<std::uint8_t>& buffer() { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}

  template <typename U>
  U le(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<U>(b_[pos_ + i]) << (8 * i));
    }
    pos_ += sizeof(U);
    return v;
  }
  float f32(const char* what) { return std::bit_cast<float>(le<std::uint32_t>(what)); }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (pos_ + n > b_.size()) {
      throw CheckpointError("checkpoint truncated while reading " + std::string(what) +
                            " at byte offset " + std::to_string(pos_));
    }
  }
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
  uLong c = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed large buffers in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const std::size_t n = std::min<std::size_t>(bytes.size() - off, 1u << 30);
    c = ::crc32(c, bytes.data() + off, static_cast<uInt>(n));
    off += n;
  }
  return static_cast<std::uint32_t>(c);
}

Checkpoint::Checkpoint(std::vector<CheckpointEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string_view> seen;
  for (const auto& e : entries_) {
    if (!seen.insert(e.name).second) {
      throw CheckpointError("duplicate checkpoint entry '" + e.name + "'");
    }
  }
}

Checkpoint Checkpoint::from_params(const ParamStore& params) {
  std::vector<CheckpointEntry> out;
  out.reserve(params.size());
  for (const auto& e : params.entries()) out.push_back({e.name, e.value});
  return Checkpoint(std::move(out));
}

const CheckpointEntry* Checkpoint::find(std::string_view name) const {
  for (const auto& e : entries_)
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<std::uint8_t> Checkpoint::serialize() const {
  Writer w;
  w.bytes(kMagic, 4);
  w.le<std::uint32_t>(kCheckpointVersion);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(entries_.size()));
  for (const auto& e : entries_) {
    if (e.name.size() > UINT16_MAX) {
      throw CheckpointError("entry name too long: " + e.name.substr(0, 64) + "...");
    }
    if (e.value.rank() > UINT8_MAX) {
      throw CheckpointError("entry '" + e.name + "' has rank > 255");
    }
    w.le<std::uint16_t>(static_cast<std::uint16_t>(e.name.size()));
    w.bytes(e.name.data(), e.name.size());
    w.le<std::uint8_t>(static_cast<std::uint8_t>(e.value.rank()));
    for (std::size_t d : e.value.shape()) {
      if (d > UINT32_MAX) throw CheckpointError("entry '" + e.name + "' extent overflows u32");
      w.le<std::uint32_t>(static_cast<std::uint32_t>(d));
    }
    for (float f : e.value.data()) w.f32(f);
  }
  const std::uint32_t crc = crc32(w.buffer());
  w.le<std::uint32_t>(crc);
  return std::move(w.buffer());
}

Checkpoint Checkpoint::deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) {
    throw CheckpointError("checkpoint too short: " + std::to_string(bytes.size()) + " bytes");
  }
  const std::size_t body = bytes.size() - 4;
  Reader tail(bytes.subspan(body));
  const std::uint32_t stored = tail.le<std::uint32_t>("crc");
  const std::uint32_t actual = crc32(bytes.first(body));
  if (stored != actual) {
    throw CheckpointError("checkpoint CRC mismatch: stored " + std::to_string(stored) +
                          ", computed " + std::to_string(actual));
  }
  Reader r(bytes.first(body));
  if (r.str(4, "magic") != std::string(kMagic, 4)) {
    throw CheckpointError("not a checkpoint: bad magic bytes");
  }
  const auto version = r.le<std::uint32_t>("version");
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = r.le<std::uint32_t>("entry count");
  std::vector<CheckpointEntry> entries;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.le<std::uint16_t>("name length");
    std::string name = r.str(len, "name");
    const auto rank = r.le<std::uint8_t>("rank");
    Shape shape(rank);
    for (auto& d : shape) d = r.le<std::uint32_t>("extent");
    const std::size_t n = shape_size(shape);
    if (n > (body - r.pos()) / 4) {
      throw CheckpointError("checkpoint entry '" + name + "' payload of " +
                            std::to_string(n) + " floats exceeds remaining bytes at offset " +
                            std::to_string(r.pos()));
    }
    std::vector<float> data(n);
    for (auto& f : data) f = r.f32("payload");
    try {
      entries.push_back({std::move(name), Tensor(std::move(shape), std::move(data))});
    } catch (const ShapeError& e) {
      throw CheckpointError(std::string("checkpoint entry has invalid shape: ") + e.what());
    }
  }
  if (r.pos() != body) {
    throw CheckpointError("checkpoint has " + std::to_string(body - r.pos()) +
                          " trailing bytes before the CRC");
  }
  return Checkpoint(std::move(entries));
}

void Checkpoint::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw CheckpointError("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  if (!os) throw CheckpointError("write failed for '" + path.string() + "'");
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

std::uint32_t Checkpoint::checksum() const {
  const auto bytes = serialize();
  return crc32(std::span<const std::uint8_t>(bytes).first(bytes.size() - 4));
}

bool Checkpoint::bit_equal(const Checkpoint& other) const {
  if (entries_.size() != other.entries_.size()) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& a = entries_[i];
    const auto& b = other.entries_[i];
    if (a.name != b.name || a.value.shape() != b.value.shape()) return false;
    if (std::memcmp(a.value.raw(), b.value.raw(), a.value.size() * sizeof(float)) != 0) {
      return false;
    }
  }
  return true;
}

NetGraph transfer_weights(const Checkpoint& src, NetGraph dst) {
  std::vector<std::string> problems;
  std::set<std::string_view> dst_names;
  for (auto& e : dst.params().entries()) {
    dst_names.insert(e.name);
    const auto* s = src.find(e.name);
    if (!s) {
      problems.push_back("missing '" + e.name + "'");
    } else if (s->value.shape() != e.value.shape()) {
      problems.push_back("shape mismatch '" + e.name + "': checkpoint " +
                         shape_to_string(s->value.shape()) + " vs graph " +
                         shape_to_string(e.value.shape()));
    }
  }
  for (const auto& e : src.entries()) {
    if (!dst_names.count(e.name)) {
      problems.push_back("absent from graph '" + e.name + "'");
    }
  }
  if (!problems.empty()) {
    std::string msg = "weight transfer failed (" + std::to_string(problems.size()) + " offenders):";
    for (const auto& p : problems) msg += "\n  " + p;
    throw CheckpointError(msg);
  }
  for (auto& e : dst.params().entries()) e.value = src.find(e.name)->value;
  return dst;
}

bool params_bit_equal(const ParamStore& params, const Checkpoint& ckpt) {
  return Checkpoint::from_params(params).bit_equal(ckpt);
}

}  // namespace deskip
