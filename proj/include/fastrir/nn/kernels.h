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

#ifndef FASTRIR_NN_KERNELS_H_
#define FASTRIR_NN_KERNELS_H_

// Compute kernels behind the layers. The default namespace holds the
// OpenMP + BLAS implementations; kernels::serial holds plain loops used as
// the reference in tests and the baseline in bench/.
//
// Layouts: signals (batch, channels, length); conv weights (out, in, k);
// transposed-conv weights (in, out, k); linear weights (out, in).
// Every backward kernel accumulates into dw/db and overwrites dx.

namespace fastrir::nn::kernels {

struct ConvShape {
  int batch = 1;
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 1;
  int stride = 1;
  int padding = 0;
  int output_padding = 0;  // transposed convolution only
  int in_length = 1;
  int out_length = 1;
};

// Output length of a strided convolution / its transpose.
int conv_out_length(int in_length, int kernel, int stride, int padding);
int conv_transpose_out_length(int in_length, int kernel, int stride,
                              int padding, int output_padding);

template <typename T>
void linear_forward(int batch, int in, int out, const T* x, const T* w,
                    const T* b, T* y);
template <typename T>
void linear_backward(int batch, int in, int out, const T* x, const T* w,
                     const T* dy, T* dx, T* dw, T* db);

template <typename T>
void conv1d_forward(const ConvShape& s, const T* x, const T* w, const T* b,
                    T* y);
template <typename T>
void conv1d_backward(const ConvShape& s, const T* x, const T* w, const T* dy,
                     T* dx, T* dw, T* db);

template <typename T>
void conv_transpose1d_forward(const ConvShape& s, const T* x, const T* w,
                              const T* b, T* y);
template <typename T>
void conv_transpose1d_backward(const ConvShape& s, const T* x, const T* w,
                               const T* dy, T* dx, T* dw, T* db);

namespace serial {

template <typename T>
void linear_forward(int batch, int in, int out, const T* x, const T* w,
                    const T* b, T* y);
template <typename T>
void linear_backward(int batch, int in, int out, const T* x, const T* w,
                     const T* dy, T* dx, T* dw, T* db);
template <typename T>
void conv1d_forward(const ConvShape& s, const T* x, const T* w, const T* b,
                    T* y);
template <typename T>
void conv1d_backward(const ConvShape& s, const T* x, const T* w, const T* dy,
                     T* dx, T* dw, T* db);
template <typename T>
void conv_transpose1d_forward(const ConvShape& s, const T* x, const T* w,
                              const T* b, T* y);
template <typename T>
void conv_transpose1d_backward(const ConvShape& s, const T* x, const T* w,
                               const T* dy, T* dx, T* dw, T* db);

}  // namespace serial

}  // namespace fastrir::nn::kernels

#endif  // FASTRIR_NN_KERNELS_H_
