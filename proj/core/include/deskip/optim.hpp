// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "deskip/net.hpp"

namespace deskip {

struct SgdOptions {
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0;
};

/// Velocity buffers, lazily shaped on the first step.
template <typename T>
struct SgdState {
  std::vector<BasicTensor<T>> velocity;
};

/// v <- momentum * v + grad + weight_decay * param;  param <- param - lr * v
///
/// `grads` is aligned with `params.entries()`; null entries (running stats)
/// are skipped.
template <typename T>
void sgd_step(BasicParamStore<T>& params,
              const std::vector<const BasicTensor<T>*>& grads,
              SgdState<T>& state, const SgdOptions& opts);

}  // namespace deskip
