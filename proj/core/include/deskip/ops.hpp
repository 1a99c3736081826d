// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

// Layer kernels. Every forward has a matching backward that takes the
// upstream gradient and returns input/parameter gradients. All tensors are
// NCHW (or [N, F] for dense layers).

#pragma once

#include <cstdint>
#include <span>

#include "deskip/tensor.hpp"

namespace deskip {

enum class ConvAlgo { Direct, Im2col };

struct Conv2dParams {
  std::size_t stride = 1;
  std::size_t pad = 1;
};

/// floor((in + 2*pad - kernel) / stride) + 1
std::size_t conv_out_extent(std::size_t in, std::size_t kernel,
                            std::size_t stride, std::size_t pad);

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                              Conv2dParams p, ConvAlgo algo = ConvAlgo::Im2col);

template <typename T>
struct Conv2dGrads {
  BasicTensor<T> dx;
  BasicTensor<T> dw;
};

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& x,
                               const BasicTensor<T>& w,
                               const BasicTensor<T>& dy, Conv2dParams p,
                               ConvAlgo algo = ConvAlgo::Im2col);

enum class BnMode { Train, Eval };

struct BnOptions {
  double eps = 1e-5;
  double momentum = 0.1;
};

/// Per-channel running statistics, updated in train mode as
/// running = (1 - momentum) * running + momentum * batch.
template <typename T>
struct RunningStats {
  BasicTensor<T> mean;
  BasicTensor<T> var;
};

template <typename T>
struct BnCache {
  BasicTensor<T> xhat;
  std::vector<T> inv_std;
  BnMode mode = BnMode::Train;
};

template <typename T>
struct BnForward {
  BasicTensor<T> y;
  BnCache<T> cache;
};

/// Running stats are updated in place in train mode (unbiased variance).
template <typename T>
BnForward<T> batchnorm_forward(const BasicTensor<T>& x,
                               const BasicTensor<T>& gamma,
                               const BasicTensor<T>& beta,
                               RunningStats<T>& stats, BnMode mode,
                               BnOptions opts = {});

template <typename T>
struct BnGrads {
  BasicTensor<T> dx;
  BasicTensor<T> dgamma;
  BasicTensor<T> dbeta;
};

template <typename T>
BnGrads<T> batchnorm_backward(const BasicTensor<T>& dy,
                              const BasicTensor<T>& gamma,
                              const BnCache<T>& cache);

template <typename T>
BasicTensor<T> relu_forward(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x,
                             const BasicTensor<T>& dy);

template <typename T>
BasicTensor<T> add_forward(const BasicTensor<T>& a, const BasicTensor<T>& b);

/// Parameter-free "option A" shortcut: spatial subsampling by `stride` and
/// zero-padding of channels, split evenly before and after the input
/// channels.
template <typename T>
BasicTensor<T> shortcut_forward(const BasicTensor<T>& x,
                                std::size_t out_channels, std::size_t stride);

template <typename T>
BasicTensor<T> shortcut_backward(const Shape& x_shape,
                                 const BasicTensor<T>& dy, std::size_t stride);

template <typename T>
BasicTensor<T> global_avg_pool_forward(const BasicTensor<T>& x);

template <typename T>
BasicTensor<T> global_avg_pool_backward(const Shape& x_shape,
                                        const BasicTensor<T>& dy);

/// y[n, o] = sum_i x[n, i] * w[o, i] + b[o]
template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                             const BasicTensor<T>& b);

template <typename T>
struct DenseGrads {
  BasicTensor<T> dx;
  BasicTensor<T> dw;
  BasicTensor<T> db;
};

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                             const BasicTensor<T>& dy);

template <typename T>
struct XentResult {
  T loss;                  // mean over the batch
  BasicTensor<T> dlogits;  // (softmax - onehot) / N
  std::size_t correct;     // argmax hits
};

template <typename T>
XentResult<T> softmax_xent(const BasicTensor<T>& logits,
                           std::span<const std::int32_t> labels);

}  // namespace deskip
