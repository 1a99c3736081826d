// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/optim.hpp"

namespace deskip {

template <typename T>
void sgd_step(BasicParamStore<T>& params,
              const std::vector<const BasicTensor<T>*>& grads,
              SgdState<T>& state, const SgdOptions& opts) {
  auto& entries = params.entries();
  if (grads.size() != entries.size()) {
    throw ShapeError("sgd_step: " + std::to_string(grads.size()) +
                     " gradients for " + std::to_string(entries.size()) + " parameters");
  }
  if (state.velocity.size() != entries.size()) state.velocity.resize(entries.size());
  const T lr = static_cast<T>(opts.lr);
  const T mu = static_cast<T>(opts.momentum);
  const T wd = static_cast<T>(opts.weight_decay);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const BasicTensor<T>* g = grads[i];
    if (!g) continue;
    auto& p = entries[i].value;
    if (g->shape() != p.shape()) {
      throw ShapeError("sgd_step: gradient for '" + entries[i].name + "' has shape " +
                       shape_to_string(g->shape()) + ", parameter " +
                       shape_to_string(p.shape()));
    }
    auto& v = state.velocity[i];
    if (v.empty()) v = BasicTensor<T>(p.shape());
    for (std::size_t k = 0; k < p.size(); ++k) {
      v[k] = mu * v[k] + (*g)[k] + wd * p[k];
      p[k] -= lr * v[k];
    }
  }
}

template void sgd_step(ParamStore&, const std::vector<const Tensor*>&, SgdState<float>&,
                       const SgdOptions&);
template void sgd_step(ParamStore64&, const std::vector<const Tensor64*>&,
                       SgdState<double>&, const SgdOptions&);

}  // namespace deskip
