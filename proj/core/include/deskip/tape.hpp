// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "deskip/ops.hpp"
#include "deskip/tensor.hpp"

namespace deskip {

/// Handle to a value recorded on a Tape.
struct Var {
  std::size_t id = static_cast<std::size_t>(-1);
  bool valid() const { return id != static_cast<std::size_t>(-1); }
  friend bool operator==(Var, Var) = default;
};

/// Define-by-run reverse-mode tape. Each op evaluates eagerly and records a
/// closure that maps the node's gradient to its inputs. Gradients arriving
/// at a value from several consumers are summed, which is what makes a
/// forked activation (the source of a skip connection) receive the gradient
/// of both paths.
template <typename T>
class Tape {
 public:
  explicit Tape(ConvAlgo conv_algo = ConvAlgo::Im2col) : conv_algo_(conv_algo) {}

  /// Constant leaf; no gradient is tracked.
  Var input(BasicTensor<T> value);
  /// Leaf whose gradient is kept after backward().
  Var parameter(BasicTensor<T> value);

  Var conv2d(Var x, Var w, Conv2dParams p);
  Var batchnorm(Var x, Var gamma, Var beta, RunningStats<T>& stats,
                BnMode mode, BnOptions opts = {});
  Var relu(Var x);
  Var add(Var a, Var b);
  Var shortcut(Var x, std::size_t out_channels, std::size_t stride);
  Var global_avg_pool(Var x);
  Var dense(Var x, Var w, Var b);
  /// Scalar mean cross-entropy; `labels` is copied.
  Var softmax_xent(Var logits, std::span<const std::int32_t> labels);
  /// Scalar sum(weights * x); handy for probing gradients of any op.
  Var weighted_sum(Var x, BasicTensor<T> weights);

  const BasicTensor<T>& value(Var v) const;
  /// Gradient after backward(); a zero tensor if nothing flowed into `v`.
  const BasicTensor<T>& grad(Var v) const;

  /// Seeds d(root)/d(root) = 1; `root` must hold a single element.
  void backward(Var root);
  /// Seeds an arbitrary upstream gradient at `root`.
  void backward(Var root, BasicTensor<T> seed);

  std::size_t size() const { return nodes_.size(); }
  /// Number of recorded ops that read `v`.
  std::size_t consumers(Var v) const;
  bool backward_done() const { return backward_done_; }

 private:
  struct Node {
    BasicTensor<T> value;
    BasicTensor<T> grad;
    bool requires_grad = false;
    std::vector<std::size_t> inputs;
    std::function<void(Tape&, const Node&)> backward;
  };

  Var push(BasicTensor<T> value, std::vector<std::size_t> inputs,
           std::function<void(Tape&, const Node&)> backward);
  const Node& node(Var v) const;
  void accumulate(std::size_t id, BasicTensor<T> g);
  bool wants_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  ConvAlgo conv_algo_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> consumers_;
  bool backward_done_ = false;
};

extern template class Tape<float>;
extern template class Tape<double>;

}  // namespace deskip
