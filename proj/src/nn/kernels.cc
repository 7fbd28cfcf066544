// Copyright 2026 The fastrir Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fastrir/nn/kernels.h"

#include <cblas.h>

#include <algorithm>
#include <vector>

#include "fastrir/error.h"

namespace fastrir::nn::kernels {

namespace {

// Upper bound on the im2col scratch per chunk of batch items.
constexpr size_t kMaxScratch = size_t{1} << 23;

void gemm(bool ta, bool tb, int m, int n, int k, float alpha, const float* a,
          int lda, const float* b, int ldb, float beta, float* c, int ldc) {
  cblas_sgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans,
              tb ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb,
              beta, c, ldc);
}

void gemm(bool ta, bool tb, int m, int n, int k, double alpha, const double* a,
          int lda, const double* b, int ldb, double beta, double* c, int ldc) {
  cblas_dgemm(CblasRowMajor, ta ? CblasTrans : CblasNoTrans,
              tb ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb,
              beta, c, ldc);
}

int chunk_items(size_t rows, size_t positions, int batch) {
  const size_t per_item = std::max<size_t>(1, rows * positions);
  return static_cast<int>(
      std::clamp<size_t>(kMaxScratch / per_item, 1, static_cast<size_t>(batch)));
}

// cols[(c * k_len + k), item * positions + p] = signal[item, c, p * stride -
// pad + k], zero outside the signal.
template <typename T>
void im2col(const T* signal, int items, int channels, int k_len, int stride,
            int pad, int signal_len, int positions, T* cols) {
  const long rows = static_cast<long>(channels) * k_len;
  const long ncols = static_cast<long>(items) * positions;
#pragma omp parallel for schedule(static)
  for (long r = 0; r < rows; ++r) {
    const int c = static_cast<int>(r / k_len);
    const int k = static_cast<int>(r % k_len);
    T* dst = cols + r * ncols;
    for (int it = 0; it < items; ++it) {
      const T* src = signal + (static_cast<long>(it) * channels + c) * signal_len;
      for (int p = 0; p < positions; ++p) {
        const int pos = p * stride - pad + k;
        dst[it * positions + p] =
            (pos >= 0 && pos < signal_len) ? src[pos] : T(0);
      }
    }
  }
}

// Adjoint of im2col: accumulates cols back into signal.
template <typename T>
void col2im(const T* cols, int items, int channels, int k_len, int stride,
            int pad, int signal_len, int positions, T* signal) {
  const long ncols = static_cast<long>(items) * positions;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int k = 0; k < k_len; ++k) {
      const T* src = cols + (static_cast<long>(c) * k_len + k) * ncols;
      for (int it = 0; it < items; ++it) {
        T* dst = signal + (static_cast<long>(it) * channels + c) * signal_len;
        for (int p = 0; p < positions; ++p) {
          const int pos = p * stride - pad + k;
          if (pos >= 0 && pos < signal_len) dst[pos] += src[it * positions + p];
        }
      }
    }
  }
}

// Inputs with few columns (small batches at short lengths): the BLAS path
// is dominated by packing the weight matrix, so stream it once instead.
constexpr int kNarrowColumns = 32;
constexpr int kNarrowRowBlock = 2048;

// out[j, r] = sum_ci in[ci, j] * w[ci, r]; w is (cin, rows), out (ncols, rows).
template <typename T>
void narrow_gemm_tn(int rows, int ncols, int cin, const T* w, const T* in,
                    T* out) {
  std::fill_n(out, static_cast<long>(ncols) * rows, T(0));
  const int blocks = (rows + kNarrowRowBlock - 1) / kNarrowRowBlock;
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < blocks; ++blk) {
    const int r0 = blk * kNarrowRowBlock;
    const int r1 = std::min(rows, r0 + kNarrowRowBlock);
    for (int ci = 0; ci < cin; ++ci) {
      const T* wr = w + static_cast<long>(ci) * rows;
      for (int j = 0; j < ncols; ++j) {
        const T a = in[static_cast<long>(ci) * ncols + j];
        if (a == T(0)) continue;
        T* o = out + static_cast<long>(j) * rows;
#pragma omp simd
        for (int r = r0; r < r1; ++r) o[r] += a * wr[r];
      }
    }
  }
}

// col2im for the (ncols, rows) layout produced by narrow_gemm_tn.
template <typename T>
void col2im_rows(const T* cols, int items, int channels, int k_len, int stride,
                 int pad, int signal_len, int positions, T* signal) {
  const long rows = static_cast<long>(channels) * k_len;
#pragma omp parallel for collapse(2) schedule(static)
  for (int it = 0; it < items; ++it) {
    for (int c = 0; c < channels; ++c) {
      T* dst = signal + (static_cast<long>(it) * channels + c) * signal_len;
      for (int p = 0; p < positions; ++p) {
        const T* src = cols + (static_cast<long>(it) * positions + p) * rows +
                       static_cast<long>(c) * k_len;
        const int base = p * stride - pad;
        const int k0 = std::max(0, -base);
        const int k1 = std::min(k_len, signal_len - base);
        for (int k = k0; k < k1; ++k) dst[base + k] += src[k];
      }
    }
  }
}

// (items, channels, len) <-> (channels, items * len)
template <typename T>
void to_channel_major(const T* src, int items, int channels, int len, T* dst) {
  const long ncols = static_cast<long>(items) * len;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    for (int it = 0; it < items; ++it) {
      std::copy_n(src + (static_cast<long>(it) * channels + c) * len, len,
                  dst + c * ncols + static_cast<long>(it) * len);
    }
  }
}

template <typename T>
void from_channel_major(const T* src, int items, int channels, int len,
                        const T* bias, T* dst) {
  const long ncols = static_cast<long>(items) * len;
#pragma omp parallel for schedule(static)
  for (int c = 0; c < channels; ++c) {
    const T b = bias ? bias[c] : T(0);
    for (int it = 0; it < items; ++it) {
      const T* s = src + c * ncols + static_cast<long>(it) * len;
      T* d = dst + (static_cast<long>(it) * channels + c) * len;
      for (int p = 0; p < len; ++p) d[p] = s[p] + b;
    }
  }
}

template <typename T>
void accumulate_bias_grad(const T* dy, int batch, int channels, int len,
                          T* db) {
  if (!db) return;
  for (int c = 0; c < channels; ++c) {
    T acc = 0;
    for (int it = 0; it < batch; ++it) {
      const T* s = dy + (static_cast<long>(it) * channels + c) * len;
      for (int p = 0; p < len; ++p) acc += s[p];
    }
    db[c] += acc;
  }
}

}  // namespace

int conv_out_length(int in_length, int kernel, int stride, int padding) {
  const int span = in_length + 2 * padding - kernel;
  if (span < 0) throw ConfigError("convolution kernel longer than input");
  return span / stride + 1;
}

int conv_transpose_out_length(int in_length, int kernel, int stride,
                              int padding, int output_padding) {
  return (in_length - 1) * stride - 2 * padding + kernel + output_padding;
}

template <typename T>
void linear_forward(int batch, int in, int out, const T* x, const T* w,
                    const T* b, T* y) {
  gemm(false, true, batch, out, in, T(1), x, in, w, in, T(0), y, out);
  if (b) {
    for (int i = 0; i < batch; ++i) {
      for (int o = 0; o < out; ++o) y[static_cast<long>(i) * out + o] += b[o];
    }
  }
}

template <typename T>
void linear_backward(int batch, int in, int out, const T* x, const T* w,
                     const T* dy, T* dx, T* dw, T* db) {
  if (dw) gemm(true, false, out, in, batch, T(1), dy, out, x, in, T(1), dw, in);
  if (dx) gemm(false, false, batch, in, out, T(1), dy, out, w, in, T(0), dx, in);
  accumulate_bias_grad(dy, batch, out, 1, db);
}

template <typename T>
void conv1d_forward(const ConvShape& s, const T* x, const T* w, const T* b,
                    T* y) {
  const int rows = s.in_channels * s.kernel;
  const int chunk = chunk_items(rows, s.out_length, s.batch);
  std::vector<T> cols(static_cast<size_t>(rows) * chunk * s.out_length);
  std::vector<T> out(static_cast<size_t>(s.out_channels) * chunk * s.out_length);
  for (int b0 = 0; b0 < s.batch; b0 += chunk) {
    const int nb = std::min(chunk, s.batch - b0);
    const int ncols = nb * s.out_length;
    im2col(x + static_cast<long>(b0) * s.in_channels * s.in_length, nb,
           s.in_channels, s.kernel, s.stride, s.padding, s.in_length,
           s.out_length, cols.data());
    gemm(false, false, s.out_channels, ncols, rows, T(1), w, rows, cols.data(),
         ncols, T(0), out.data(), ncols);
    from_channel_major(out.data(), nb, s.out_channels, s.out_length, b,
                       y + static_cast<long>(b0) * s.out_channels * s.out_length);
  }
}

template <typename T>
void conv1d_backward(const ConvShape& s, const T* x, const T* w, const T* dy,
                     T* dx, T* dw, T* db) {
  const int rows = s.in_channels * s.kernel;
  const int chunk = chunk_items(rows, s.out_length, s.batch);
  std::vector<T> cols(static_cast<size_t>(rows) * chunk * s.out_length);
  std::vector<T> grad(static_cast<size_t>(s.out_channels) * chunk * s.out_length);
  if (dx) {
    std::fill_n(dx, static_cast<size_t>(s.batch) * s.in_channels * s.in_length,
                T(0));
  }
  for (int b0 = 0; b0 < s.batch; b0 += chunk) {
    const int nb = std::min(chunk, s.batch - b0);
    const int ncols = nb * s.out_length;
    to_channel_major(dy + static_cast<long>(b0) * s.out_channels * s.out_length,
                     nb, s.out_channels, s.out_length, grad.data());
    if (dw) {
      im2col(x + static_cast<long>(b0) * s.in_channels * s.in_length, nb,
             s.in_channels, s.kernel, s.stride, s.padding, s.in_length,
             s.out_length, cols.data());
      gemm(false, true, s.out_channels, rows, ncols, T(1), grad.data(), ncols,
           cols.data(), ncols, T(1), dw, rows);
    }
    if (dx) {
      gemm(true, false, rows, ncols, s.out_channels, T(1), w, rows,
           grad.data(), ncols, T(0), cols.data(), ncols);
      col2im(cols.data(), nb, s.in_channels, s.kernel, s.stride, s.padding,
             s.in_length, s.out_length,
             dx + static_cast<long>(b0) * s.in_channels * s.in_length);
    }
  }
  accumulate_bias_grad(dy, s.batch, s.out_channels, s.out_length, db);
}

template <typename T>
void conv_transpose1d_forward(const ConvShape& s, const T* x, const T* w,
                              const T* b, T* y) {
  const int rows = s.out_channels * s.kernel;
  const int chunk = chunk_items(rows, s.in_length, s.batch);
  std::vector<T> in(static_cast<size_t>(s.in_channels) * chunk * s.in_length);
  std::vector<T> cols(static_cast<size_t>(rows) * chunk * s.in_length);
  const long y_item = static_cast<long>(s.out_channels) * s.out_length;
  for (int b0 = 0; b0 < s.batch; b0 += chunk) {
    const int nb = std::min(chunk, s.batch - b0);
    const int ncols = nb * s.in_length;
    to_channel_major(x + static_cast<long>(b0) * s.in_channels * s.in_length,
                     nb, s.in_channels, s.in_length, in.data());
    const bool narrow = ncols <= kNarrowColumns;
    if (narrow) {
      narrow_gemm_tn(rows, ncols, s.in_channels, w, in.data(), cols.data());
    } else {
      gemm(true, false, rows, ncols, s.in_channels, T(1), w, rows, in.data(),
           ncols, T(0), cols.data(), ncols);
    }
    T* ychunk = y + b0 * y_item;
    for (int it = 0; it < nb; ++it) {
      for (int c = 0; c < s.out_channels; ++c) {
        std::fill_n(ychunk + it * y_item + static_cast<long>(c) * s.out_length,
                    s.out_length, b ? b[c] : T(0));
      }
    }
    if (narrow) {
      col2im_rows(cols.data(), nb, s.out_channels, s.kernel, s.stride,
                  s.padding, s.out_length, s.in_length, ychunk);
    } else {
      col2im(cols.data(), nb, s.out_channels, s.kernel, s.stride, s.padding,
             s.out_length, s.in_length, ychunk);
    }
  }
}

template <typename T>
void conv_transpose1d_backward(const ConvShape& s, const T* x, const T* w,
                               const T* dy, T* dx, T* dw, T* db) {
  const int rows = s.out_channels * s.kernel;
  const int chunk = chunk_items(rows, s.in_length, s.batch);
  std::vector<T> in(static_cast<size_t>(s.in_channels) * chunk * s.in_length);
  std::vector<T> cols(static_cast<size_t>(rows) * chunk * s.in_length);
  for (int b0 = 0; b0 < s.batch; b0 += chunk) {
    const int nb = std::min(chunk, s.batch - b0);
    const int ncols = nb * s.in_length;
    im2col(dy + static_cast<long>(b0) * s.out_channels * s.out_length, nb,
           s.out_channels, s.kernel, s.stride, s.padding, s.out_length,
           s.in_length, cols.data());
    if (dw) {
      to_channel_major(x + static_cast<long>(b0) * s.in_channels * s.in_length,
                       nb, s.in_channels, s.in_length, in.data());
      gemm(false, true, s.in_channels, rows, ncols, T(1), in.data(), ncols,
           cols.data(), ncols, T(1), dw, rows);
    }
    if (dx) {
      gemm(false, false, s.in_channels, ncols, rows, T(1), w, rows,
           cols.data(), ncols, T(0), in.data(), ncols);
      from_channel_major(in.data(), nb, s.in_channels, s.in_length,
                         static_cast<const T*>(nullptr),
                         dx + static_cast<long>(b0) * s.in_channels * s.in_length);
    }
  }
  accumulate_bias_grad(dy, s.batch, s.out_channels, s.out_length, db);
}

namespace serial {

template <typename T>
void linear_forward(int batch, int in, int out, const T* x, const T* w,
                    const T* b, T* y) {
  for (int i = 0; i < batch; ++i) {
    for (int o = 0; o < out; ++o) {
      T acc = b ? b[o] : T(0);
      for (int j = 0; j < in; ++j) {
        acc += w[static_cast<long>(o) * in + j] * x[static_cast<long>(i) * in + j];
      }
      y[static_cast<long>(i) * out + o] = acc;
    }
  }
}

template <typename T>
void linear_backward(int batch, int in, int out, const T* x, const T* w,
                     const T* dy, T* dx, T* dw, T* db) {
  if (dx) std::fill_n(dx, static_cast<long>(batch) * in, T(0));
  for (int i = 0; i < batch; ++i) {
    for (int o = 0; o < out; ++o) {
      const T g = dy[static_cast<long>(i) * out + o];
      if (db) db[o] += g;
      for (int j = 0; j < in; ++j) {
        if (dw) dw[static_cast<long>(o) * in + j] += g * x[static_cast<long>(i) * in + j];
        if (dx) dx[static_cast<long>(i) * in + j] += g * w[static_cast<long>(o) * in + j];
      }
    }
  }
}

template <typename T>
void conv1d_forward(const ConvShape& s, const T* x, const T* w, const T* b,
                    T* y) {
  for (int n = 0; n < s.batch; ++n) {
    for (int co = 0; co < s.out_channels; ++co) {
      for (int l = 0; l < s.out_length; ++l) {
        T acc = b ? b[co] : T(0);
        for (int ci = 0; ci < s.in_channels; ++ci) {
          for (int k = 0; k < s.kernel; ++k) {
            const int pos = l * s.stride - s.padding + k;
            if (pos < 0 || pos >= s.in_length) continue;
            acc += w[(static_cast<long>(co) * s.in_channels + ci) * s.kernel + k] *
                   x[(static_cast<long>(n) * s.in_channels + ci) * s.in_length + pos];
          }
        }
        y[(static_cast<long>(n) * s.out_channels + co) * s.out_length + l] = acc;
      }
    }
  }
}

template <typename T>
void conv1d_backward(const ConvShape& s, const T* x, const T* w, const T* dy,
                     T* dx, T* dw, T* db) {
  if (dx) {
    std::fill_n(dx, static_cast<long>(s.batch) * s.in_channels * s.in_length, T(0));
  }
  for (int n = 0; n < s.batch; ++n) {
    for (int co = 0; co < s.out_channels; ++co) {
      for (int l = 0; l < s.out_length; ++l) {
        const T g = dy[(static_cast<long>(n) * s.out_channels + co) * s.out_length + l];
        if (db) db[co] += g;
        for (int ci = 0; ci < s.in_channels; ++ci) {
          for (int k = 0; k < s.kernel; ++k) {
            const int pos = l * s.stride - s.padding + k;
            if (pos < 0 || pos >= s.in_length) continue;
            const long wi = (static_cast<long>(co) * s.in_channels + ci) * s.kernel + k;
            const long xi = (static_cast<long>(n) * s.in_channels + ci) * s.in_length + pos;
            if (dw) dw[wi] += g * x[xi];
            if (dx) dx[xi] += g * w[wi];
          }
        }
      }
    }
  }
}

template <typename T>
void conv_transpose1d_forward(const ConvShape& s, const T* x, const T* w,
                              const T* b, T* y) {
  for (int n = 0; n < s.batch; ++n) {
    for (int co = 0; co < s.out_channels; ++co) {
      T* yrow = y + (static_cast<long>(n) * s.out_channels + co) * s.out_length;
      std::fill_n(yrow, s.out_length, b ? b[co] : T(0));
    }
    for (int ci = 0; ci < s.in_channels; ++ci) {
      for (int l = 0; l < s.in_length; ++l) {
        const T xv = x[(static_cast<long>(n) * s.in_channels + ci) * s.in_length + l];
        for (int co = 0; co < s.out_channels; ++co) {
          T* yrow = y + (static_cast<long>(n) * s.out_channels + co) * s.out_length;
          for (int k = 0; k < s.kernel; ++k) {
            const int pos = l * s.stride - s.padding + k;
            if (pos < 0 || pos >= s.out_length) continue;
            yrow[pos] += xv * w[(static_cast<long>(ci) * s.out_channels + co) * s.kernel + k];
          }
        }
      }
    }
  }
}

template <typename T>
void conv_transpose1d_backward(const ConvShape& s, const T* x, const T* w,
                               const T* dy, T* dx, T* dw, T* db) {
  for (int n = 0; n < s.batch; ++n) {
    for (int ci = 0; ci < s.in_channels; ++ci) {
      for (int l = 0; l < s.in_length; ++l) {
        const long xi = (static_cast<long>(n) * s.in_channels + ci) * s.in_length + l;
        T acc = 0;
        for (int co = 0; co < s.out_channels; ++co) {
          const T* grow = dy + (static_cast<long>(n) * s.out_channels + co) * s.out_length;
          for (int k = 0; k < s.kernel; ++k) {
            const int pos = l * s.stride - s.padding + k;
            if (pos < 0 || pos >= s.out_length) continue;
            const long wi = (static_cast<long>(ci) * s.out_channels + co) * s.kernel + k;
            acc += grow[pos] * w[wi];
            if (dw) dw[wi] += x[xi] * grow[pos];
          }
        }
        if (dx) dx[xi] = acc;
      }
    }
  }
  if (db) {
    for (int n = 0; n < s.batch; ++n) {
      for (int co = 0; co < s.out_channels; ++co) {
        const T* grow = dy + (static_cast<long>(n) * s.out_channels + co) * s.out_length;
        for (int p = 0; p < s.out_length; ++p) db[co] += grow[p];
      }
    }
  }
}

}  // namespace serial

#define FASTRIR_INSTANTIATE_KERNELS(NS, T)                                    \
  template void NS::linear_forward<T>(int, int, int, const T*, const T*,     \
                                      const T*, T*);                         \
  template void NS::linear_backward<T>(int, int, int, const T*, const T*,    \
                                       const T*, T*, T*, T*);                \
  template void NS::conv1d_forward<T>(const ConvShape&, const T*, const T*,  \
                                      const T*, T*);                         \
  template void NS::conv1d_backward<T>(const ConvShape&, const T*, const T*, \
                                       const T*, T*, T*, T*);                \
  template void NS::conv_transpose1d_forward<T>(                             \
      const ConvShape&, const T*, const T*, const T*, T*);                   \
  template void NS::conv_transpose1d_backward<T>(                            \
      const ConvShape&, const T*, const T*, const T*, T*, T*, T*);

FASTRIR_INSTANTIATE_KERNELS(kernels, float)
FASTRIR_INSTANTIATE_KERNELS(kernels, double)
FASTRIR_INSTANTIATE_KERNELS(serial, float)
FASTRIR_INSTANTIATE_KERNELS(serial, double)

#undef FASTRIR_INSTANTIATE_KERNELS

}  // namespace fastrir::nn::kernels
