// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/net.hpp"

#include <cmath>

namespace deskip {

std::string_view to_string(SkipKind k) {
  switch (k) {
    case SkipKind::Full: return "full";
    case SkipKind::Short: return "short";
    case SkipKind::None: return "none";
  }
  return "?";
}

std::string_view to_string(ShortSpan s) {
  return s == ShortSpan::First ? "first" : "second";
}

std::string_view to_string(JoinOrder j) {
  return j == JoinOrder::AddThenRelu ? "add_then_relu" : "relu_then_add";
}

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Input: return "input";
    case NodeKind::Conv: return "conv";
    case NodeKind::BatchNorm: return "batchnorm";
    case NodeKind::Relu: return "relu";
    case NodeKind::Add: return "add";
    case NodeKind::Shortcut: return "shortcut";
    case NodeKind::GlobalAvgPool: return "global_avg_pool";
    case NodeKind::Dense: return "dense";
  }
  return "?";
}

SkipKind parse_skip_kind(std::string_view s) {
  if (s == "full") return SkipKind::Full;
  if (s == "short") return SkipKind::Short;
  if (s == "none") return SkipKind::None;
  throw ConfigError("unknown skip kind '" + std::string(s) +
                    "' (expected full, short or none)");
}

ShortSpan parse_short_span(std::string_view s) {
  if (s == "first") return ShortSpan::First;
  if (s == "second") return ShortSpan::Second;
  throw ConfigError("unknown short_span '" + std::string(s) +
                    "' (expected first or second)");
}

JoinOrder parse_join_order(std::string_view s) {
  if (s == "add_then_relu") return JoinOrder::AddThenRelu;
  if (s == "relu_then_add") return JoinOrder::ReluThenAdd;
  throw ConfigError("unknown short_join '" + std::string(s) +
                    "' (expected add_then_relu or relu_then_add)");
}

NetSpec NetSpec::uniform(std::size_t n, std::array<std::size_t, 3> widths,
                         std::size_t num_classes, std::size_t in_channels,
                         SkipKind kind) {
  NetSpec s;
  s.n = n;
  s.widths = widths;
  s.num_classes = num_classes;
  s.in_channels = in_channels;
  s.skip_kinds.assign(3 * n, kind);
  return s;
}

void NetSpec::validate() const {
  if (n == 0) throw ConfigError("net spec: n (blocks per stage) must be >= 1");
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (widths[i] == 0) {
      throw ConfigError("net spec: stage " + std::to_string(i + 1) +
                        " width must be positive");
    }
  }
  if (widths[1] < widths[0] || widths[2] < widths[1]) {
    throw ConfigError("net spec: stage widths must be nondecreasing "
                      "(parameter-free shortcuts only pad channels)");
  }
  if (num_classes < 2) throw ConfigError("net spec: num_classes must be >= 2");
  if (in_channels == 0) throw ConfigError("net spec: in_channels must be >= 1");
  if (skip_kinds.size() != num_blocks()) {
    throw ConfigError("net spec: skip_kinds has " +
                      std::to_string(skip_kinds.size()) + " entries, expected 3n = " +
                      std::to_string(num_blocks()));
  }
}

// ---------------------------------------------------------------------------
// Parameter store

template <typename T>
void BasicParamStore<T>::add(std::string name, BasicTensor<T> value,
                             bool trainable) {
  if (index_.count(name)) {
    throw ConfigError("parameter '" + name + "' registered twice");
  }
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), std::move(value), trainable});
}

template <typename T>
ParamEntry<T>* BasicParamStore<T>::find(std::string_view name) {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

template <typename T>
const ParamEntry<T>* BasicParamStore<T>::find(std::string_view name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

template <typename T>
BasicTensor<T>& BasicParamStore<T>::at(std::string_view name) {
  auto* e = find(name);
  if (!e) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return e->value;
}

template <typename T>
const BasicTensor<T>& BasicParamStore<T>::at(std::string_view name) const {
  const auto* e = find(name);
  if (!e) throw ConfigError("unknown parameter '" + std::string(name) + "'");
  return e->value;
}

template <typename T>
std::optional<std::size_t> BasicParamStore<T>::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

template <typename T>
std::size_t BasicParamStore<T>::scalar_count(bool trainable_only) const {
  std::size_t total = 0;
  for (const auto& e : entries_)
    if (e.trainable || !trainable_only) total += e.value.size();
  return total;
}

template class BasicParamStore<float>;
template class BasicParamStore<double>;

// ---------------------------------------------------------------------------
// Graph construction

namespace {

std::string block_prefix(std::size_t stage, std::size_t j) {
  return "s" + std::to_string(stage) + ".b" + std::to_string(j);
}

class GraphBuilder {
 public:
  explicit GraphBuilder(std::vector<LayerNode>& nodes) : nodes_(nodes) {}

  std::size_t add(NodeKind kind, std::string name, std::vector<std::size_t> inputs,
                  std::size_t block, std::size_t out_channels = 0,
                  std::size_t stride = 1) {
    nodes_.push_back({kind, std::move(name), std::move(inputs), out_channels,
                      stride, block});
    return nodes_.size() - 1;
  }

  // conv -> bn, returns the bn node
  std::size_t conv_bn(std::size_t in, const std::string& prefix, std::size_t unit,
                      std::size_t channels, std::size_t stride, std::size_t block) {
    const auto u = std::to_string(unit);
    const auto c = add(NodeKind::Conv, prefix + ".conv" + u, {in}, block, channels, stride);
    return add(NodeKind::BatchNorm, prefix + ".bn" + u, {c}, block, channels);
  }

  std::size_t relu(std::size_t in, const std::string& name, std::size_t block) {
    return add(NodeKind::Relu, name, {in}, block);
  }

  // identity, or option-A shortcut when geometry changes
  std::size_t shortcut(std::size_t in, const std::string& prefix,
                       std::size_t in_ch, std::size_t out_ch, std::size_t stride,
                       std::size_t block) {
    if (stride == 1 && in_ch == out_ch) return in;
    return add(NodeKind::Shortcut, prefix + ".shortcut", {in}, block, out_ch, stride);
  }

 private:
  std::vector<LayerNode>& nodes_;
};

}  // namespace

std::vector<std::pair<std::string, Shape>> parameter_layout(const NetSpec& spec) {
  spec.validate();
  std::vector<std::pair<std::string, Shape>> out;
  auto bn = [&](const std::string& p, std::size_t c) {
    out.emplace_back(p + ".gamma", Shape{c});
    out.emplace_back(p + ".beta", Shape{c});
    out.emplace_back(p + ".running_mean", Shape{c});
    out.emplace_back(p + ".running_var", Shape{c});
  };
  out.emplace_back("stem.conv.weight", Shape{spec.widths[0], spec.in_channels, 3, 3});
  bn("stem.bn", spec.widths[0]);
  std::size_t in_ch = spec.widths[0];
  for (std::size_t stage = 1; stage <= 3; ++stage) {
    const std::size_t ch = spec.widths[stage - 1];
    for (std::size_t j = 1; j <= spec.n; ++j) {
      const auto p = block_prefix(stage, j);
      out.emplace_back(p + ".conv1.weight", Shape{ch, in_ch, 3, 3});
      bn(p + ".bn1", ch);
      out.emplace_back(p + ".conv2.weight", Shape{ch, ch, 3, 3});
      bn(p + ".bn2", ch);
      in_ch = ch;
    }
  }
  out.emplace_back("fc.weight", Shape{spec.num_classes, spec.widths[2]});
  out.emplace_back("fc.bias", Shape{spec.num_classes});
  return out;
}

void NetGraph::wire() {
  spec_.validate();
  nodes_.clear();
  skips_.clear();
  block_outputs_.clear();
  GraphBuilder b(nodes_);

  const std::size_t input = b.add(NodeKind::Input, "input", {}, 0, spec_.in_channels);
  const std::size_t stem_conv =
      b.add(NodeKind::Conv, "stem.conv", {input}, 0, spec_.widths[0], 1);
  const std::size_t stem_bn =
      b.add(NodeKind::BatchNorm, "stem.bn", {stem_conv}, 0, spec_.widths[0]);
  std::size_t x = b.relu(stem_bn, "stem.relu", 0);

  std::size_t in_ch = spec_.widths[0];
  std::size_t block = 0;
  for (std::size_t stage = 1; stage <= 3; ++stage) {
    const std::size_t ch = spec_.widths[stage - 1];
    for (std::size_t j = 1; j <= spec_.n; ++j) {
      ++block;
      const std::size_t stride = (stage > 1 && j == 1) ? 2 : 1;
      const auto p = block_prefix(stage, j);
      const SkipKind kind = spec_.skip_kinds[block - 1];
      const std::size_t in = x;
      std::size_t out = 0;

      if (kind == SkipKind::Short && spec_.short_span == ShortSpan::First) {
        const std::size_t bn1 = b.conv_bn(in, p, 1, ch, stride, block);
        const std::size_t sc = b.shortcut(in, p, in_ch, ch, stride, block);
        std::size_t mid;
        if (spec_.short_join == JoinOrder::AddThenRelu) {
          const std::size_t add = b.add(NodeKind::Add, p + ".add", {bn1, sc}, block);
          skips_.push_back({block, in, add});
          mid = b.relu(add, p + ".relu1", block);
        } else {
          const std::size_t r1 = b.relu(bn1, p + ".relu1", block);
          mid = b.add(NodeKind::Add, p + ".add", {r1, sc}, block);
          skips_.push_back({block, in, mid});
        }
        const std::size_t bn2 = b.conv_bn(mid, p, 2, ch, 1, block);
        out = b.relu(bn2, p + ".relu2", block);
      } else {
        const std::size_t bn1 = b.conv_bn(in, p, 1, ch, stride, block);
        const std::size_t r1 = b.relu(bn1, p + ".relu1", block);
        const std::size_t bn2 = b.conv_bn(r1, p, 2, ch, 1, block);
        switch (kind) {
          case SkipKind::Full: {
            const std::size_t sc = b.shortcut(in, p, in_ch, ch, stride, block);
            const std::size_t add = b.add(NodeKind::Add, p + ".add", {bn2, sc}, block);
            skips_.push_back({block, in, add});
            out = b.relu(add, p + ".relu2", block);
            break;
          }
          case SkipKind::Short: {
            if (spec_.short_join == JoinOrder::AddThenRelu) {
              const std::size_t add = b.add(NodeKind::Add, p + ".add", {bn2, r1}, block);
              skips_.push_back({block, r1, add});
              out = b.relu(add, p + ".relu2", block);
            } else {
              const std::size_t r2 = b.relu(bn2, p + ".relu2", block);
              out = b.add(NodeKind::Add, p + ".add", {r2, r1}, block);
              skips_.push_back({block, r1, out});
            }
            break;
          }
          case SkipKind::None:
            out = b.relu(bn2, p + ".relu2", block);
            break;
        }
      }
      block_outputs_.push_back(out);
      x = out;
      in_ch = ch;
    }
  }
  const std::size_t pool = b.add(NodeKind::GlobalAvgPool, "pool", {x}, 0);
  b.add(NodeKind::Dense, "fc", {pool}, 0, spec_.num_classes);
}

std::size_t NetGraph::weighted_layers() const {
  std::size_t n = 0;
  for (const auto& node : nodes_)
    if (node.kind == NodeKind::Conv || node.kind == NodeKind::Dense) ++n;
  return n;
}

std::vector<std::size_t> NetGraph::fan_out() const {
  std::vector<std::size_t> out(nodes_.size(), 0);
  for (const auto& node : nodes_)
    for (std::size_t in : node.inputs) ++out[in];
  return out;
}

SkipKind NetGraph::skip_kind(std::size_t block) const {
  if (block == 0 || block > spec_.num_blocks()) {
    throw ConfigError("block index " + std::to_string(block) + " outside [1, " +
                      std::to_string(spec_.num_blocks()) + "]");
  }
  return spec_.skip_kinds[block - 1];
}

void NetGraph::set_skip(std::size_t block, SkipKind kind) {
  if (skip_kind(block) == kind) return;
  spec_.skip_kinds[block - 1] = kind;
  wire();
}

NetGraph build_net_zero(const NetSpec& spec) {
  NetGraph g;
  g.spec_ = spec;
  g.wire();
  for (auto& [name, shape] : parameter_layout(spec)) {
    const bool running = name.ends_with(".running_mean") || name.ends_with(".running_var");
    const float fill = (name.ends_with(".gamma") || name.ends_with(".running_var")) ? 1.0f : 0.0f;
    g.params_.add(name, Tensor(shape, fill), !running);
  }
  return g;
}

NetGraph build_net(const NetSpec& spec, std::uint64_t seed) {
  NetGraph g = build_net_zero(spec);
  const Rng root(seed);
  for (auto& e : g.params_.entries()) {
    if (!e.name.ends_with(".weight")) continue;
    const auto& s = e.value.shape();
    const std::size_t fan_in = e.value.size() / s[0];
    const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Rng rng = root.split(e.name);
    for (auto& v : e.value.data()) v = static_cast<float>(std_dev * rng.normal());
  }
  return g;
}

NetGraph set_skip(NetGraph graph, std::size_t block, SkipKind kind) {
  graph.set_skip(block, kind);
  return graph;
}

template <typename T>
NetForward<T> forward(Tape<T>& tape, const NetGraph& graph,
                      BasicParamStore<T>& params, const BasicTensor<T>& x,
                      BnMode mode, BnOptions bn) {
  const auto& gp = graph.params().entries();
  if (params.size() != gp.size()) {
    throw ConfigError("forward: parameter store has " + std::to_string(params.size()) +
                      " entries, graph expects " + std::to_string(gp.size()));
  }
  if (x.rank() != 4 || x.dim(1) != graph.spec().in_channels) {
    throw ShapeError("forward: input must be [N, " +
                     std::to_string(graph.spec().in_channels) + ", H, W], got " +
                     shape_to_string(x.shape()));
  }

  NetForward<T> out;
  out.param_vars.resize(params.size());
  auto& entries = params.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].name != gp[i].name || entries[i].value.shape() != gp[i].value.shape()) {
      throw ConfigError("forward: parameter " + std::to_string(i) + " ('" +
                        entries[i].name + "') does not match graph layout ('" +
                        gp[i].name + "')");
    }
    if (entries[i].trainable) out.param_vars[i] = tape.parameter(entries[i].value);
  }
  auto pvar = [&](const std::string& name) {
    return out.param_vars[*params.index_of(name)];
  };

  const auto& nodes = graph.nodes();
  out.node_vars.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const LayerNode& n = nodes[i];
    auto in = [&](std::size_t k) { return out.node_vars[n.inputs[k]]; };
    Var v;
    switch (n.kind) {
      case NodeKind::Input:
        v = tape.input(x);
        break;
      case NodeKind::Conv:
        v = tape.conv2d(in(0), pvar(n.name + ".weight"), {n.stride, 1});
        break;
      case NodeKind::BatchNorm: {
        auto& mean = params.at(n.name + ".running_mean");
        auto& var = params.at(n.name + ".running_var");
        RunningStats<T> stats{mean, var};
        v = tape.batchnorm(in(0), pvar(n.name + ".gamma"), pvar(n.name + ".beta"),
                           stats, mode, bn);
        mean = std::move(stats.mean);
        var = std::move(stats.var);
        break;
      }
      case NodeKind::Relu:
        v = tape.relu(in(0));
        break;
      case NodeKind::Add:
        v = tape.add(in(0), in(1));
        break;
      case NodeKind::Shortcut:
        v = tape.shortcut(in(0), n.out_channels, n.stride);
        break;
      case NodeKind::GlobalAvgPool:
        v = tape.global_avg_pool(in(0));
        break;
      case NodeKind::Dense:
        v = tape.dense(in(0), pvar(n.name + ".weight"), pvar(n.name + ".bias"));
        break;
    }
    out.node_vars[i] = v;
  }
  out.logits = out.node_vars.back();
  return out;
}

template NetForward<float> forward(Tape<float>&, const NetGraph&, ParamStore&,
                                   const Tensor&, BnMode, BnOptions);
template NetForward<double> forward(Tape<double>&, const NetGraph&, ParamStore64&,
                                    const Tensor64&, BnMode, BnOptions);

}  // namespace deskip
