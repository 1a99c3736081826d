// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

// ResNet-(6n+2) family for CIFAR-sized inputs. A network is a stem conv,
// 3n two-conv blocks in three stages, global average pooling and a dense
// classifier. Each block carries a SkipKind that decides only how the
// fork/join edges are wired; the parameter table never depends on it, so a
// checkpoint moves freely between the three topologies.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deskip/ops.hpp"
#include "deskip/rng.hpp"
#include "deskip/tape.hpp"
#include "deskip/tensor.hpp"

namespace deskip {

/// Full spans both conv-BN units of a block, Short spans one, None removes
/// the skip and leaves a plain chain.
enum class SkipKind { Full, Short, None };

/// Which conv-BN unit a Short skip spans.
enum class ShortSpan { First, Second };

/// Where the unit's ReLU sits relative to a Short skip's join.
enum class JoinOrder { AddThenRelu, ReluThenAdd };

std::string_view to_string(SkipKind k);
std::string_view to_string(ShortSpan s);
std::string_view to_string(JoinOrder j);
SkipKind parse_skip_kind(std::string_view s);
ShortSpan parse_short_span(std::string_view s);
JoinOrder parse_join_order(std::string_view s);

struct NetSpec {
  std::size_t n = 3;  // blocks per stage
  std::array<std::size_t, 3> widths{16, 32, 64};
  std::size_t num_classes = 10;
  std::size_t in_channels = 3;
  std::vector<SkipKind> skip_kinds;  // one per block, front to back
  ShortSpan short_span = ShortSpan::Second;
  JoinOrder short_join = JoinOrder::AddThenRelu;

  /// Spec with every block set to `kind`.
  static NetSpec uniform(std::size_t n, std::array<std::size_t, 3> widths,
                         std::size_t num_classes, std::size_t in_channels,
                         SkipKind kind);

  std::size_t num_blocks() const { return 3 * n; }
  std::size_t depth() const { return 6 * n + 2; }
  /// Throws ConfigError when the NetSpec cannot be built.
  void validate() const;

  friend bool operator==(const NetSpec&, const NetSpec&) = default;
};

template <typename T>
struct ParamEntry {
  std::string name;
  BasicTensor<T> value;
  bool trainable = true;  // false for BN running statistics
};

/// Ordered, name-indexed parameter table.
template <typename T>
class BasicParamStore {
 public:
  void add(std::string name, BasicTensor<T> value, bool trainable = true);

  std::size_t size() const { return entries_.size(); }
  std::vector<ParamEntry<T>>& entries() { return entries_; }
  const std::vector<ParamEntry<T>>& entries() const { return entries_; }

  ParamEntry<T>* find(std::string_view name);
  const ParamEntry<T>* find(std::string_view name) const;
  BasicTensor<T>& at(std::string_view name);
  const BasicTensor<T>& at(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  template <typename U>
  BasicParamStore<U> cast() const {
    BasicParamStore<U> out;
    for (const auto& e : entries_) out.add(e.name, e.value.template cast<U>(), e.trainable);
    return out;
  }

  /// Number of scalars, optionally restricted to trainable entries.
  std::size_t scalar_count(bool trainable_only = true) const;

 private:
  std::vector<ParamEntry<T>> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

using ParamStore = BasicParamStore<float>;
using ParamStore64 = BasicParamStore<double>;

enum class NodeKind { Input, Conv, BatchNorm, Relu, Add, Shortcut, GlobalAvgPool, Dense };

std::string_view to_string(NodeKind k);

struct LayerNode {
  NodeKind kind = NodeKind::Input;
  std::string name;                  // also the parameter prefix
  std::vector<std::size_t> inputs;   // node indices
  std::size_t out_channels = 0;      // Conv, Shortcut, Dense
  std::size_t stride = 1;            // Conv, Shortcut
  std::size_t block = 0;             // 1-based block index, 0 outside blocks
};

/// One active skip connection: `fork` is the node whose output is reused,
/// `join` the Add node that consumes it.
struct SkipEdge {
  std::size_t block = 0;
  std::size_t fork = 0;
  std::size_t join = 0;
  friend bool operator==(const SkipEdge&, const SkipEdge&) = default;
};

class NetGraph {
 public:
  const NetSpec& spec() const { return spec_; }
  const std::vector<LayerNode>& nodes() const { return nodes_; }
  const std::vector<SkipEdge>& skips() const { return skips_; }
  std::size_t output_node() const { return nodes_.size() - 1; }

  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  std::size_t fork_join_pairs() const { return skips_.size(); }
  /// Conv and dense layers.
  std::size_t weighted_layers() const;
  /// For each node, how many nodes read its output.
  std::vector<std::size_t> fan_out() const;
  /// Node indices of the last node of each block (1-based index - 1).
  const std::vector<std::size_t>& block_outputs() const { return block_outputs_; }
  SkipKind skip_kind(std::size_t block) const;

  /// Rewires block `block` (1-based) to `kind`. Parameters are untouched.
  void set_skip(std::size_t block, SkipKind kind);

 private:
  friend NetGraph build_net(const NetSpec& spec, std::uint64_t seed);
  friend NetGraph build_net_zero(const NetSpec& spec);
  void wire();

  NetSpec spec_;
  std::vector<LayerNode> nodes_;
  std::vector<SkipEdge> skips_;
  std::vector<std::size_t> block_outputs_;
  ParamStore params_;
};

/// Builds the graph and He-normal initializes conv/dense weights
/// (std = sqrt(2 / fan_in)); BN gamma = 1, beta = 0, running mean 0,
/// running var 1; dense bias 0. Each tensor draws from its own stream
/// keyed by parameter name.
NetGraph build_net(const NetSpec& spec, std::uint64_t seed = 0);

/// Same graph with all-zero parameters (BN gamma and running var still 1).
NetGraph build_net_zero(const NetSpec& spec);

/// Copy of `graph` with block `block` (1-based) rewired to `kind`.
NetGraph set_skip(NetGraph graph, std::size_t block, SkipKind kind);

/// Parameter names and shapes a NetSpec implies, in table order.
std::vector<std::pair<std::string, Shape>> parameter_layout(const NetSpec& spec);

template <typename T>
struct NetForward {
  Var logits;
  std::vector<Var> node_vars;   // one per graph node
  std::vector<Var> param_vars;  // aligned with the store; invalid if not trainable
};

/// Records one forward pass of `graph` on `tape`, reading parameters from
/// `params` (whose layout must match the graph's table). Train-mode BN
/// updates the running statistics inside `params`.
template <typename T>
NetForward<T> forward(Tape<T>& tape, const NetGraph& graph,
                      BasicParamStore<T>& params, const BasicTensor<T>& x,
                      BnMode mode, BnOptions bn = {});

extern template class BasicParamStore<float>;
extern template class BasicParamStore<double>;

}  // namespace deskip
