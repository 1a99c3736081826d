// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/tape.hpp"

#include <string>
#include <utility>

namespace deskip {

template <typename T>
Var Tape<T>::push(BasicTensor<T> value, std::vector<std::size_t> inputs,
                  std::function<void(Tape&, const Node&)> backward) {
  if (backward_done_) {
    throw TapeError("tape: cannot record new ops after backward()");
  }
  Node n;
  n.value = std::move(value);
  for (std::size_t in : inputs) {
    n.requires_grad = n.requires_grad || nodes_[in].requires_grad;
    ++consumers_[in];
  }
  n.inputs = std::move(inputs);
  n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  consumers_.push_back(0);
  return Var{nodes_.size() - 1};
}

template <typename T>
const typename Tape<T>::Node& Tape<T>::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) {
    throw TapeError("tape: variable " + std::to_string(v.id) +
                    " was not recorded on this tape");
  }
  return nodes_[v.id];
}

template <typename T>
void Tape<T>::accumulate(std::size_t id, BasicTensor<T> g) {
  Node& n = nodes_[id];
  if (!n.requires_grad) return;
  if (n.grad.empty()) {
    n.grad = std::move(g);
    return;
  }
  if (n.grad.shape() != g.shape()) {
    throw ShapeError("tape: gradient shape " + shape_to_string(g.shape()) +
                     " does not match value shape " +
                     shape_to_string(n.grad.shape()));
  }
  for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
}

template <typename T>
Var Tape<T>::input(BasicTensor<T> value) {
  return push(std::move(value), {}, nullptr);
}

template <typename T>
Var Tape<T>::parameter(BasicTensor<T> value) {
  Var v = push(std::move(value), {}, nullptr);
  nodes_[v.id].requires_grad = true;
  return v;
}

template <typename T>
Var Tape<T>::conv2d(Var x, Var w, Conv2dParams p) {
  const ConvAlgo algo = conv_algo_;
  auto y = conv2d_forward(node(x).value, node(w).value, p, algo);
  return push(std::move(y), {x.id, w.id},
              [p, algo](Tape& t, const Node& self) {
                const std::size_t xi = self.inputs[0], wi = self.inputs[1];
                auto g = conv2d_backward(t.nodes_[xi].value, t.nodes_[wi].value,
                                         self.grad, p, algo);
                t.accumulate(xi, std::move(g.dx));
                t.accumulate(wi, std::move(g.dw));
              });
}

template <typename T>
Var Tape<T>::batchnorm(Var x, Var gamma, Var beta, RunningStats<T>& stats,
                       BnMode mode, BnOptions opts) {
  auto f = batchnorm_forward(node(x).value, node(gamma).value,
                             node(beta).value, stats, mode, opts);
  return push(std::move(f.y), {x.id, gamma.id, beta.id},
              [cache = std::move(f.cache)](Tape& t, const Node& self) {
                const std::size_t xi = self.inputs[0];
                const std::size_t gi = self.inputs[1];
                const std::size_t bi = self.inputs[2];
                auto g = batchnorm_backward(self.grad, t.nodes_[gi].value, cache);
                t.accumulate(xi, std::move(g.dx));
                t.accumulate(gi, std::move(g.dgamma));
                t.accumulate(bi, std::move(g.dbeta));
              });
}

template <typename T>
Var Tape<T>::relu(Var x) {
  return push(relu_forward(node(x).value), {x.id},
              [](Tape& t, const Node& self) {
                const std::size_t xi = self.inputs[0];
                if (!t.wants_grad(xi)) return;
                t.accumulate(xi, relu_backward(t.nodes_[xi].value, self.grad));
              });
}

template <typename T>
Var Tape<T>::add(Var a, Var b) {
  return push(add_forward(node(a).value, node(b).value), {a.id, b.id},
              [](Tape& t, const Node& self) {
                // Sum rule: both operands receive the upstream gradient as is.
                t.accumulate(self.inputs[0], self.grad);
                t.accumulate(self.inputs[1], self.grad);
              });
}

template <typename T>
Var Tape<T>::shortcut(Var x, std::size_t out_channels, std::size_t stride) {
  Shape x_shape = node(x).value.shape();
  return push(shortcut_forward(node(x).value, out_channels, stride), {x.id},
              [x_shape, stride](Tape& t, const Node& self) {
                t.accumulate(self.inputs[0],
                             shortcut_backward(x_shape, self.grad, stride));
              });
}

template <typename T>
Var Tape<T>::global_avg_pool(Var x) {
  Shape x_shape = node(x).value.shape();
  return push(global_avg_pool_forward(node(x).value), {x.id},
              [x_shape](Tape& t, const Node& self) {
                t.accumulate(self.inputs[0],
                             global_avg_pool_backward(x_shape, self.grad));
              });
}

template <typename T>
Var Tape<T>::dense(Var x, Var w, Var b) {
  return push(dense_forward(node(x).value, node(w).value, node(b).value),
              {x.id, w.id, b.id}, [](Tape& t, const Node& self) {
                auto g = dense_backward(t.nodes_[self.inputs[0]].value,
                                        t.nodes_[self.inputs[1]].value,
                                        self.grad);
                t.accumulate(self.inputs[0], std::move(g.dx));
                t.accumulate(self.inputs[1], std::move(g.dw));
                t.accumulate(self.inputs[2], std::move(g.db));
              });
}

template <typename T>
Var Tape<T>::softmax_xent(Var logits, std::span<const std::int32_t> labels) {
  auto r = deskip::softmax_xent(node(logits).value, labels);
  BasicTensor<T> loss({1}, r.loss);
  return push(std::move(loss), {logits.id},
              [d = std::move(r.dlogits)](Tape& t, const Node& self) {
                BasicTensor<T> g = d;
                for (std::size_t i = 0; i < g.size(); ++i) g[i] *= self.grad[0];
                t.accumulate(self.inputs[0], std::move(g));
              });
}

template <typename T>
Var Tape<T>::weighted_sum(Var x, BasicTensor<T> weights) {
  const auto& xv = node(x).value;
  if (weights.shape() != xv.shape()) {
    throw ShapeError("weighted_sum: weight shape " +
                     shape_to_string(weights.shape()) + " != input shape " +
                     shape_to_string(xv.shape()));
  }
  T s{0};
  for (std::size_t i = 0; i < xv.size(); ++i) s += weights[i] * xv[i];
  return push(BasicTensor<T>({1}, s), {x.id},
              [w = std::move(weights)](Tape& t, const Node& self) {
                BasicTensor<T> g = w;
                for (std::size_t i = 0; i < g.size(); ++i) g[i] *= self.grad[0];
                t.accumulate(self.inputs[0], std::move(g));
              });
}

template <typename T>
const BasicTensor<T>& Tape<T>::value(Var v) const {
  return node(v).value;
}

template <typename T>
const BasicTensor<T>& Tape<T>::grad(Var v) const {
  const Node& n = node(v);
  if (!backward_done_) {
    throw TapeError("tape: gradients requested before backward()");
  }
  if (!n.requires_grad) {
    throw TapeError("tape: variable " + std::to_string(v.id) +
                    " does not track gradients");
  }
  return n.grad;
}

template <typename T>
std::size_t Tape<T>::consumers(Var v) const {
  node(v);
  return consumers_[v.id];
}

template <typename T>
void Tape<T>::backward(Var root) {
  if (nodes_.empty()) {
    throw TapeError("tape: backward() called with no recorded forward pass");
  }
  if (node(root).value.size() != 1) {
    throw TapeError("tape: backward() without a seed needs a scalar root, got " +
                    shape_to_string(node(root).value.shape()));
  }
  backward(root, BasicTensor<T>(node(root).value.shape(), T{1}));
}

template <typename T>
void Tape<T>::backward(Var root, BasicTensor<T> seed) {
  if (nodes_.empty()) {
    throw TapeError("tape: backward() called with no recorded forward pass");
  }
  if (backward_done_) {
    throw TapeError("tape: backward() already ran on this tape");
  }
  const Node& r = node(root);
  if (seed.shape() != r.value.shape()) {
    throw ShapeError("tape: seed shape " + shape_to_string(seed.shape()) +
                     " != root shape " + shape_to_string(r.value.shape()));
  }
  backward_done_ = true;
  nodes_[root.id].requires_grad = true;
  nodes_[root.id].grad = std::move(seed);
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty() || !n.backward) continue;
    n.backward(*this, n);
  }
  for (Node& n : nodes_) {
    if (n.requires_grad && n.grad.empty()) n.grad = BasicTensor<T>(n.value.shape());
  }
}

template class Tape<float>;
template class Tape<double>;

}  // namespace deskip
