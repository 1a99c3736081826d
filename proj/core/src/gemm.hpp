// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>

namespace deskip::detail {

/// C[M,N] (+)= A[M,K] * B[K,N], all row-major and densely packed.
/// Rows of C are processed four at a time so each row of B is loaded once
/// per four FMA streams; the inner loop is contiguous and vectorizes.
template <typename T>
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const T* a,
             const T* b, T* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, T{0});
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    T* __restrict c0 = c + (i + 0) * n;
    T* __restrict c1 = c + (i + 1) * n;
    T* __restrict c2 = c + (i + 2) * n;
    T* __restrict c3 = c + (i + 3) * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T a0 = a[(i + 0) * k + p];
      const T a1 = a[(i + 1) * k + p];
      const T a2 = a[(i + 2) * k + p];
      const T a3 = a[(i + 3) * k + p];
      const T* __restrict br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) {
        const T bv = br[j];
        c0[j] += a0 * bv;
        c1[j] += a1 * bv;
        c2[j] += a2 * bv;
        c3[j] += a3 * bv;
      }
    }
  }
  for (; i < m; ++i) {
    T* __restrict cr = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const T av = a[i * k + p];
      const T* __restrict br = b + p * n;
      for (std::size_t j = 0; j < n; ++j) cr[j] += av * br[j];
    }
  }
}

/// C[M,N] += A[M,K] * B[N,K]^T. Each dot product keeps eight partial sums
/// in a fixed order, so results do not depend on the vector width.
template <typename T>
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const T* a, const T* b, T* c) {
  constexpr std::size_t kLanes = 8;
  const std::size_t kv = k - k % kLanes;
  for (std::size_t i = 0; i < m; ++i) {
    const T* __restrict ar = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const T* __restrict br = b + j * k;
      T acc[kLanes] = {};
      for (std::size_t p = 0; p < kv; p += kLanes) {
        for (std::size_t l = 0; l < kLanes; ++l) acc[l] += ar[p + l] * br[p + l];
      }
      T sum = T{0};
      for (std::size_t l = 0; l < kLanes; ++l) sum += acc[l];
      for (std::size_t p = kv; p < k; ++p) sum += ar[p] * br[p];
      c[i * n + j] += sum;
    }
  }
}

template <typename T>
void transpose(std::size_t rows, std::size_t cols, const T* src, T* dst) {
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) dst[c * rows + r] = src[r * cols + c];
  }
}

}  // namespace deskip::detail
