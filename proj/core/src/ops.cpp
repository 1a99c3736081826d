// Copyright (C) 2026 The deskip Authors
// SPDX-License-Identifier: Apache-2.0

#include "deskip/ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "gemm.hpp"

namespace deskip {

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

std::size_t conv_out_extent(std::size_t in, std::size_t kernel,
                            std::size_t stride, std::size_t pad) {
  if (in + 2 * pad < kernel) {
    throw ShapeError("conv2d: kernel extent " + std::to_string(kernel) +
                     " exceeds padded input extent " +
                     std::to_string(in + 2 * pad));
  }
  return (in + 2 * pad - kernel) / stride + 1;
}

namespace {

void require_rank(const Shape& s, std::size_t rank, const char* op,
                  const char* what) {
  if (s.size() != rank) {
    throw ShapeError(std::string(op) + ": " + what + " must have rank " +
                     std::to_string(rank) + ", got " + shape_to_string(s));
  }
}

struct ConvGeometry {
  std::size_t n, c, h, w;     // input
  std::size_t k, kh, kw;      // filters
  std::size_t oh, ow;         // output
  std::size_t stride, pad;
  std::size_t patch() const { return c * kh * kw; }
  std::size_t out_pixels() const { return oh * ow; }
};

template <typename T>
ConvGeometry conv_geometry(const BasicTensor<T>& x, const BasicTensor<T>& w,
                           Conv2dParams p) {
  require_rank(x.shape(), 4, "conv2d", "input");
  require_rank(w.shape(), 4, "conv2d", "weight");
  if (p.stride != 1 && p.stride != 2) {
    throw ShapeError("conv2d: stride must be 1 or 2, got " +
                     std::to_string(p.stride));
  }
  if (w.dim(1) != x.dim(1)) {
    throw ShapeError("conv2d: input channels (dim 1) mismatch: input has " +
                     std::to_string(x.dim(1)) + ", weight expects " +
                     std::to_string(w.dim(1)));
  }
  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), w.dim(0), w.dim(2),
                 w.dim(3), 0, 0, p.stride, p.pad};
  g.oh = conv_out_extent(g.h, g.kh, g.stride, g.pad);
  g.ow = conv_out_extent(g.w, g.kw, g.stride, g.pad);
  return g;
}

// Output columns [lo, hi) whose input column ox*stride + j - pad is inside
// the image.
struct ValidRange {
  std::size_t lo, hi;
};

ValidRange valid_columns(const ConvGeometry& g, std::size_t j) {
  std::size_t lo = 0;
  if (g.pad > j) lo = (g.pad - j + g.stride - 1) / g.stride;
  std::size_t hi = 0;
  if (g.w + g.pad > j) hi = std::min(g.ow, (g.w + g.pad - j - 1) / g.stride + 1);
  return {std::min(lo, hi), hi};
}

// col[(c*kh + i)*kw + j][oy*ow + ox] for image `img`.
template <typename T>
void im2col(const ConvGeometry& g, const T* img, T* col) {
  for (std::size_t c = 0; c < g.c; ++c) {
    const T* plane = img + c * g.h * g.w;
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        T* row = col + ((c * g.kh + i) * g.kw + j) * g.out_pixels();
        const ValidRange vr = valid_columns(g, j);
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.stride + i) -
                                    static_cast<std::ptrdiff_t>(g.pad);
          T* out = row + oy * g.ow;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) {
            std::fill(out, out + g.ow, T{0});
            continue;
          }
          std::fill(out, out + vr.lo, T{0});
          std::fill(out + vr.hi, out + g.ow, T{0});
          // first valid input column
          const T* src = plane + static_cast<std::size_t>(iy) * g.w + vr.lo * g.stride + j - g.pad;
          if (g.stride == 1) {
            std::copy(src, src + (vr.hi - vr.lo), out + vr.lo);
          } else {
            for (std::size_t ox = vr.lo; ox < vr.hi; ++ox, src += g.stride) out[ox] = *src;
          }
        }
      }
    }
  }
}

template <typename T>
void col2im_add(const ConvGeometry& g, const T* col, T* img) {
  for (std::size_t c = 0; c < g.c; ++c) {
    T* plane = img + c * g.h * g.w;
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        const T* row = col + ((c * g.kh + i) * g.kw + j) * g.out_pixels();
        const ValidRange vr = valid_columns(g, j);
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.stride + i) -
                                    static_cast<std::ptrdiff_t>(g.pad);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
          T* dst = plane + static_cast<std::size_t>(iy) * g.w + vr.lo * g.stride + j - g.pad;
          const T* in = row + oy * g.ow;
          if (g.stride == 1) {
            for (std::size_t ox = vr.lo; ox < vr.hi; ++ox) dst[ox - vr.lo] += in[ox];
          } else {
            for (std::size_t ox = vr.lo; ox < vr.hi; ++ox, dst += g.stride) *dst += in[ox];
          }
        }
      }
    }
  }
}

template <typename T>
void conv_direct(const ConvGeometry& g, const T* x, const T* w, T* y) {
  for (std::size_t n = 0; n < g.n; ++n) {
    for (std::size_t k = 0; k < g.k; ++k) {
      for (std::size_t oy = 0; oy < g.oh; ++oy) {
        for (std::size_t ox = 0; ox < g.ow; ++ox) {
          T acc{0};
          for (std::size_t c = 0; c < g.c; ++c) {
            for (std::size_t i = 0; i < g.kh; ++i) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.stride + i) -
                                        static_cast<std::ptrdiff_t>(g.pad);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
              for (std::size_t j = 0; j < g.kw; ++j) {
                const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.stride + j) -
                                          static_cast<std::ptrdiff_t>(g.pad);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w)) continue;
                acc += x[((n * g.c + c) * g.h + iy) * g.w + ix] *
                       w[((k * g.c + c) * g.kh + i) * g.kw + j];
              }
            }
          }
          y[((n * g.k + k) * g.oh + oy) * g.ow + ox] = acc;
        }
      }
    }
  }
}

template <typename T>
void conv_direct_backward(const ConvGeometry& g, const T* x, const T* w,
                          const T* dy, T* dx, T* dw) {
  for (std::size_t n = 0; n < g.n; ++n) {
    for (std::size_t k = 0; k < g.k; ++k) {
      for (std::size_t oy = 0; oy < g.oh; ++oy) {
        for (std::size_t ox = 0; ox < g.ow; ++ox) {
          const T gy = dy[((n * g.k + k) * g.oh + oy) * g.ow + ox];
          for (std::size_t c = 0; c < g.c; ++c) {
            for (std::size_t i = 0; i < g.kh; ++i) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.stride + i) -
                                        static_cast<std::ptrdiff_t>(g.pad);
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
              for (std::size_t j = 0; j < g.kw; ++j) {
                const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.stride + j) -
                                          static_cast<std::ptrdiff_t>(g.pad);
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w)) continue;
                const std::size_t xi = ((n * g.c + c) * g.h + iy) * g.w + ix;
                const std::size_t wi = ((k * g.c + c) * g.kh + i) * g.kw + j;
                dx[xi] += gy * w[wi];
                dw[wi] += gy * x[xi];
              }
            }
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
BasicTensor<T> conv2d_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                              Conv2dParams p, ConvAlgo algo) {
  const ConvGeometry g = conv_geometry(x, w, p);
  BasicTensor<T> y({g.n, g.k, g.oh, g.ow});
  if (algo == ConvAlgo::Direct) {
    conv_direct(g, x.raw(), w.raw(), y.raw());
    return y;
  }
  std::vector<T> col(g.patch() * g.out_pixels());
  const std::size_t in_stride = g.c * g.h * g.w;
  const std::size_t out_stride = g.k * g.out_pixels();
  for (std::size_t n = 0; n < g.n; ++n) {
    im2col(g, x.raw() + n * in_stride, col.data());
    detail::gemm_nn(g.k, g.out_pixels(), g.patch(), w.raw(), col.data(),
                    y.raw() + n * out_stride, false);
  }
  return y;
}

template <typename T>
Conv2dGrads<T> conv2d_backward(const BasicTensor<T>& x,
                               const BasicTensor<T>& w,
                               const BasicTensor<T>& dy, Conv2dParams p,
                               ConvAlgo algo) {
  const ConvGeometry g = conv_geometry(x, w, p);
  const Shape expected{g.n, g.k, g.oh, g.ow};
  if (dy.shape() != expected) {
    throw ShapeError("conv2d backward: upstream gradient shape " +
                     shape_to_string(dy.shape()) + " != output shape " +
                     shape_to_string(expected));
  }
  Conv2dGrads<T> out{BasicTensor<T>(x.shape()), BasicTensor<T>(w.shape())};
  if (algo == ConvAlgo::Direct) {
    conv_direct_backward(g, x.raw(), w.raw(), dy.raw(), out.dx.raw(),
                         out.dw.raw());
    return out;
  }
  const std::size_t patch = g.patch();
  const std::size_t pix = g.out_pixels();
  std::vector<T> col(patch * pix);
  std::vector<T> dcol(patch * pix);
  std::vector<T> w_t(patch * g.k);
  detail::transpose(g.k, patch, w.raw(), w_t.data());
  const std::size_t in_stride = g.c * g.h * g.w;
  const std::size_t out_stride = g.k * pix;
  for (std::size_t n = 0; n < g.n; ++n) {
    const T* dyn = dy.raw() + n * out_stride;
    im2col(g, x.raw() + n * in_stride, col.data());
    // dW[K, patch] += dY[K, pix] * col[patch, pix]^T
    detail::gemm_nt(g.k, patch, pix, dyn, col.data(), out.dw.raw());
    // dcol[patch, pix] = Wt[patch, K] * dY[K, pix]
    detail::gemm_nn(patch, pix, g.k, w_t.data(), dyn, dcol.data(), false);
    col2im_add(g, dcol.data(), out.dx.raw() + n * in_stride);
  }
  return out;
}

template <typename T>
BnForward<T> batchnorm_forward(const BasicTensor<T>& x,
                               const BasicTensor<T>& gamma,
                               const BasicTensor<T>& beta,
                               RunningStats<T>& stats, BnMode mode,
                               BnOptions opts) {
  if (x.rank() < 2) {
    throw ShapeError("batchnorm: input must have rank >= 2, got " +
                     shape_to_string(x.shape()));
  }
  const std::size_t n = x.dim(0);
  const std::size_t c = x.dim(1);
  const std::size_t inner = x.size() / (n * c);
  const std::array<const BasicTensor<T>*, 4> per_channel{&gamma, &beta, &stats.mean, &stats.var};
  for (const auto* t : per_channel) {
    if (t->size() != c) {
      throw ShapeError("batchnorm: per-channel parameter length " +
                       std::to_string(t->size()) + " != channel count (dim 1) " +
                       std::to_string(c));
    }
  }
  if (mode == BnMode::Train && n < 2) {
    throw ShapeError(
        "batchnorm: train mode requires batch size (dim 0) >= 2, got " +
        std::to_string(n));
  }

  BnForward<T> out{BasicTensor<T>(x.shape()),
                   {BasicTensor<T>(x.shape()), std::vector<T>(c), mode}};
  const std::size_t m = n * inner;
  for (std::size_t ch = 0; ch < c; ++ch) {
    double mean = 0.0;
    double var = 0.0;
    if (mode == BnMode::Train) {
      double sum = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const T* p = x.raw() + (b * c + ch) * inner;
        for (std::size_t i = 0; i < inner; ++i) sum += p[i];
      }
      mean = sum / static_cast<double>(m);
      double sq = 0.0;
      for (std::size_t b = 0; b < n; ++b) {
        const T* p = x.raw() + (b * c + ch) * inner;
        for (std::size_t i = 0; i < inner; ++i) {
          const double d = static_cast<double>(p[i]) - mean;
          sq += d * d;
        }
      }
      var = sq / static_cast<double>(m);
      const double unbiased = sq / static_cast<double>(m - 1);
      stats.mean[ch] = static_cast<T>((1.0 - opts.momentum) * stats.mean[ch] +
                                      opts.momentum * mean);
      stats.var[ch] = static_cast<T>((1.0 - opts.momentum) * stats.var[ch] +
                                     opts.momentum * unbiased);
    } else {
      mean = stats.mean[ch];
      var = stats.var[ch];
    }
    const double inv_std = 1.0 / std::sqrt(var + opts.eps);
    out.cache.inv_std[ch] = static_cast<T>(inv_std);
    const double g = gamma[ch];
    const double bt = beta[ch];
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * inner;
      const T* p = x.raw() + off;
      T* xh = out.cache.xhat.raw() + off;
      T* y = out.y.raw() + off;
      for (std::size_t i = 0; i < inner; ++i) {
        const double v = (static_cast<double>(p[i]) - mean) * inv_std;
        xh[i] = static_cast<T>(v);
        y[i] = static_cast<T>(g * v + bt);
      }
    }
  }
  return out;
}

template <typename T>
BnGrads<T> batchnorm_backward(const BasicTensor<T>& dy,
                              const BasicTensor<T>& gamma,
                              const BnCache<T>& cache) {
  if (dy.shape() != cache.xhat.shape()) {
    throw ShapeError("batchnorm backward: gradient shape " +
                     shape_to_string(dy.shape()) + " != input shape " +
                     shape_to_string(cache.xhat.shape()));
  }
  const std::size_t n = dy.dim(0);
  const std::size_t c = dy.dim(1);
  const std::size_t inner = dy.size() / (n * c);
  const double m = static_cast<double>(n * inner);
  BnGrads<T> out{BasicTensor<T>(dy.shape()), BasicTensor<T>({c}),
                 BasicTensor<T>({c})};
  for (std::size_t ch = 0; ch < c; ++ch) {
    double sum_dy = 0.0;
    double sum_dy_xhat = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        sum_dy += dy[off + i];
        sum_dy_xhat += static_cast<double>(dy[off + i]) * cache.xhat[off + i];
      }
    }
    out.dgamma[ch] = static_cast<T>(sum_dy_xhat);
    out.dbeta[ch] = static_cast<T>(sum_dy);
    const double g = gamma[ch];
    const double inv_std = cache.inv_std[ch];
    for (std::size_t b = 0; b < n; ++b) {
      const std::size_t off = (b * c + ch) * inner;
      for (std::size_t i = 0; i < inner; ++i) {
        double v;
        if (cache.mode == BnMode::Train) {
          v = g * inv_std / m *
              (m * dy[off + i] - sum_dy - cache.xhat[off + i] * sum_dy_xhat);
        } else {
          v = g * inv_std * dy[off + i];
        }
        out.dx[off + i] = static_cast<T>(v);
      }
    }
  }
  return out;
}

template <typename T>
BasicTensor<T> relu_forward(const BasicTensor<T>& x) {
  BasicTensor<T> y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
  return y;
}

template <typename T>
BasicTensor<T> relu_backward(const BasicTensor<T>& x,
                             const BasicTensor<T>& dy) {
  if (x.shape() != dy.shape()) {
    throw ShapeError("relu backward: gradient shape " +
                     shape_to_string(dy.shape()) + " != input shape " +
                     shape_to_string(x.shape()));
  }
  BasicTensor<T> dx(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] > T{0} ? dy[i] : T{0};
  return dx;
}

template <typename T>
BasicTensor<T> add_forward(const BasicTensor<T>& a, const BasicTensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("add: operand shapes differ: " +
                     shape_to_string(a.shape()) + " vs " +
                     shape_to_string(b.shape()));
  }
  BasicTensor<T> y(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
  return y;
}

template <typename T>
BasicTensor<T> shortcut_forward(const BasicTensor<T>& x,
                                std::size_t out_channels, std::size_t stride) {
  require_rank(x.shape(), 4, "shortcut", "input");
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  if (out_channels < c) {
    throw ShapeError("shortcut: output channels " + std::to_string(out_channels) +
                     " < input channels (dim 1) " + std::to_string(c));
  }
  if (stride == 0) throw ShapeError("shortcut: stride must be positive");
  const std::size_t oh = (h - 1) / stride + 1;
  const std::size_t ow = (w - 1) / stride + 1;
  const std::size_t lo = (out_channels - c) / 2;
  BasicTensor<T> y({n, out_channels, oh, ow});
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox)
          y.at(b, ch + lo, oy, ox) = x.at(b, ch, oy * stride, ox * stride);
  return y;
}

template <typename T>
BasicTensor<T> shortcut_backward(const Shape& x_shape,
                                 const BasicTensor<T>& dy, std::size_t stride) {
  BasicTensor<T> dx(x_shape);
  const std::size_t n = x_shape[0], c = x_shape[1];
  const std::size_t oh = dy.dim(2), ow = dy.dim(3);
  const std::size_t lo = (dy.dim(1) - c) / 2;
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t ch = 0; ch < c; ++ch)
      for (std::size_t oy = 0; oy < oh; ++oy)
        for (std::size_t ox = 0; ox < ow; ++ox)
          dx.at(b, ch, oy * stride, ox * stride) = dy.at(b, ch + lo, oy, ox);
  return dx;
}

template <typename T>
BasicTensor<T> global_avg_pool_forward(const BasicTensor<T>& x) {
  require_rank(x.shape(), 4, "global_avg_pool", "input");
  const std::size_t n = x.dim(0), c = x.dim(1), hw = x.dim(2) * x.dim(3);
  BasicTensor<T> y({n, c});
  for (std::size_t i = 0; i < n * c; ++i) {
    double s = 0.0;
    const T* p = x.raw() + i * hw;
    for (std::size_t j = 0; j < hw; ++j) s += p[j];
    y[i] = static_cast<T>(s / static_cast<double>(hw));
  }
  return y;
}

template <typename T>
BasicTensor<T> global_avg_pool_backward(const Shape& x_shape,
                                        const BasicTensor<T>& dy) {
  BasicTensor<T> dx(x_shape);
  const std::size_t hw = x_shape[2] * x_shape[3];
  const T scale = T{1} / static_cast<T>(hw);
  for (std::size_t i = 0; i < dy.size(); ++i) {
    const T v = dy[i] * scale;
    std::fill(dx.raw() + i * hw, dx.raw() + (i + 1) * hw, v);
  }
  return dx;
}

template <typename T>
BasicTensor<T> dense_forward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                             const BasicTensor<T>& b) {
  require_rank(x.shape(), 2, "dense", "input");
  require_rank(w.shape(), 2, "dense", "weight");
  const std::size_t n = x.dim(0), in = x.dim(1), out = w.dim(0);
  if (w.dim(1) != in) {
    throw ShapeError("dense: input features (dim 1) " + std::to_string(in) +
                     " != weight in_features " + std::to_string(w.dim(1)));
  }
  if (b.size() != out) {
    throw ShapeError("dense: bias length " + std::to_string(b.size()) +
                     " != out_features " + std::to_string(out));
  }
  BasicTensor<T> y({n, out});
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t o = 0; o < out; ++o) {
      T acc = b[o];
      for (std::size_t i = 0; i < in; ++i) acc += x[r * in + i] * w[o * in + i];
      y[r * out + o] = acc;
    }
  }
  return y;
}

template <typename T>
DenseGrads<T> dense_backward(const BasicTensor<T>& x, const BasicTensor<T>& w,
                             const BasicTensor<T>& dy) {
  const std::size_t n = x.dim(0), in = x.dim(1), out = w.dim(0);
  if (dy.shape() != Shape{n, out}) {
    throw ShapeError("dense backward: gradient shape " +
                     shape_to_string(dy.shape()) + " != " +
                     shape_to_string(Shape{n, out}));
  }
  DenseGrads<T> g{BasicTensor<T>(x.shape()), BasicTensor<T>(w.shape()),
                  BasicTensor<T>({out})};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t o = 0; o < out; ++o) {
      const T d = dy[r * out + o];
      g.db[o] += d;
      for (std::size_t i = 0; i < in; ++i) {
        g.dw[o * in + i] += d * x[r * in + i];
        g.dx[r * in + i] += d * w[o * in + i];
      }
    }
  }
  return g;
}

template <typename T>
XentResult<T> softmax_xent(const BasicTensor<T>& logits,
                           std::span<const std::int32_t> labels) {
  require_rank(logits.shape(), 2, "softmax_xent", "logits");
  const std::size_t n = logits.dim(0), c = logits.dim(1);
  if (labels.size() != n) {
    throw ShapeError("softmax_xent: " + std::to_string(labels.size()) +
                     " labels for batch size (dim 0) " + std::to_string(n));
  }
  XentResult<T> r{T{0}, BasicTensor<T>(logits.shape()), 0};
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const std::int32_t label = labels[b];
    if (label < 0 || static_cast<std::size_t>(label) >= c) {
      throw ShapeError("softmax_xent: label " + std::to_string(label) +
                       " outside [0, " + std::to_string(c) + ")");
    }
    const T* row = logits.raw() + b * c;
    std::size_t arg = 0;
    for (std::size_t j = 1; j < c; ++j)
      if (row[j] > row[arg]) arg = j;
    if (arg == static_cast<std::size_t>(label)) ++r.correct;
    const double mx = row[arg];
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    const double log_z = std::log(z) + mx;
    total += log_z - row[label];
    T* g = r.dlogits.raw() + b * c;
    for (std::size_t j = 0; j < c; ++j) {
      const double p = std::exp(row[j] - log_z);
      g[j] = static_cast<T>((p - (j == static_cast<std::size_t>(label) ? 1.0 : 0.0)) /
                            static_cast<double>(n));
    }
  }
  r.loss = static_cast<T>(total / static_cast<double>(n));
  return r;
}

#define DESKIP_INSTANTIATE_OPS(T)                                              \
  template BasicTensor<T> conv2d_forward(const BasicTensor<T>&,                \
                                         const BasicTensor<T>&, Conv2dParams,  \
                                         ConvAlgo);                            \
  template Conv2dGrads<T> conv2d_backward(                                     \
      const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&,     \
      Conv2dParams, ConvAlgo);                                                 \
  template BnForward<T> batchnorm_forward(                                     \
      const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&,     \
      RunningStats<T>&, BnMode, BnOptions);                                    \
  template BnGrads<T> batchnorm_backward(                                      \
      const BasicTensor<T>&, const BasicTensor<T>&, const BnCache<T>&);        \
  template BasicTensor<T> relu_forward(const BasicTensor<T>&);                 \
  template BasicTensor<T> relu_backward(const BasicTensor<T>&,                 \
                                        const BasicTensor<T>&);                \
  template BasicTensor<T> add_forward(const BasicTensor<T>&,                   \
                                      const BasicTensor<T>&);                  \
  template BasicTensor<T> shortcut_forward(const BasicTensor<T>&,              \
                                           std::size_t, std::size_t);          \
  template BasicTensor<T> shortcut_backward(const Shape&,                      \
                                            const BasicTensor<T>&,             \
                                            std::size_t);                      \
  template BasicTensor<T> global_avg_pool_forward(const BasicTensor<T>&);      \
  template BasicTensor<T> global_avg_pool_backward(const Shape&,               \
                                                   const BasicTensor<T>&);     \
  template BasicTensor<T> dense_forward(                                       \
      const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&);    \
  template DenseGrads<T> dense_backward(                                       \
      const BasicTensor<T>&, const BasicTensor<T>&, const BasicTensor<T>&);    \
  template XentResult<T> softmax_xent(const BasicTensor<T>&,                   \
                                      std::span<const std::int32_t>);

DESKIP_INSTANTIATE_OPS(float)
DESKIP_INSTANTIATE_OPS(double)

#undef DESKIP_INSTANTIATE_OPS

}  // namespace deskip
