// Copyright 2026 The fsbconv Authors.
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

#pragma once

#include <array>

#include "fsbconv/tensor.hpp"

namespace fsbconv {

struct ConvGeometry {
  std::array<std::int64_t, 3> pad{0, 0, 0};      // time, height, width
  std::array<std::int64_t, 3> stride{1, 1, 1};   // time, height, width
  std::int64_t groups = 1;
};

inline std::int64_t conv_out_extent(std::int64_t in, std::int64_t k,
                                    std::int64_t pad, std::int64_t stride) {
  if (k < 1) throw ShapeError("kernel extent must be positive");
  if (pad < 0) throw ShapeError("padding must be non-negative");
  if (stride < 1) throw ShapeError("stride must be positive");
  const std::int64_t span = in + 2 * pad - k;
  if (span < 0) {
    if (span < -stride) throw ShapeError("negative output extent");
    return 0;
  }
  return span / stride + 1;
}

// Serial reference convolutions. These are the oracle every fast path is
// checked against, so they stay plain loops: zero-padded positions are loaded
// as 0 and multiplied anyway, which keeps the data*data multiplication count
// equal to the analyzer's closed form.
namespace ref {

// input [Nb,C,T,H,W] (*) kernels [N,C/groups,K,R,S] -> [Nb,N,T',H',W'],
// cross-correlation orientation (no kernel flip), zero padding.
template <typename T>
Tensor5<T> conv3d_direct(const Tensor5<T>& in, const Tensor5<T>& ker,
                         const ConvGeometry& geom) {
  const Dims5& id = in.dims();
  const Dims5& kd = ker.dims();
  const std::int64_t Nb = id[0], C = id[1], Ti = id[2], Hi = id[3], Wi = id[4];
  const std::int64_t N = kd[0], Cg = kd[1], K = kd[2], R = kd[3], S = kd[4];
  const std::int64_t g = geom.groups;
  if (g < 1 || C % g != 0 || N % g != 0)
    throw ShapeError("groups must divide both channel counts");
  if (Cg != C / g) throw ShapeError("kernel channel extent does not match C/groups");

  const std::int64_t To = conv_out_extent(Ti, K, geom.pad[0], geom.stride[0]);
  const std::int64_t Ho = conv_out_extent(Hi, R, geom.pad[1], geom.stride[1]);
  const std::int64_t Wo = conv_out_extent(Wi, S, geom.pad[2], geom.stride[2]);
  Tensor5<T> out({Nb, N, To, Ho, Wo});

  const T* din = in.data();
  const T* dk = ker.data();
  T* dout = out.data();
  const std::int64_t Npg = N / g;

  for (std::int64_t b = 0; b < Nb; ++b)
    for (std::int64_t n = 0; n < N; ++n) {
      const std::int64_t c0 = (n / Npg) * Cg;
      for (std::int64_t to = 0; to < To; ++to)
        for (std::int64_t yo = 0; yo < Ho; ++yo)
          for (std::int64_t xo = 0; xo < Wo; ++xo) {
            T acc(0);
            for (std::int64_t cc = 0; cc < Cg; ++cc) {
              const T* in_c = din + ((b * C + c0 + cc) * Ti) * Hi * Wi;
              const T* k_c = dk + ((n * Cg + cc) * K) * R * S;
              for (std::int64_t kt = 0; kt < K; ++kt) {
                const std::int64_t ti = to * geom.stride[0] - geom.pad[0] + kt;
                const bool t_in = ti >= 0 && ti < Ti;
                for (std::int64_t ky = 0; ky < R; ++ky) {
                  const std::int64_t yi = yo * geom.stride[1] - geom.pad[1] + ky;
                  const bool y_in = t_in && yi >= 0 && yi < Hi;
                  for (std::int64_t kx = 0; kx < S; ++kx) {
                    const std::int64_t xi = xo * geom.stride[2] - geom.pad[2] + kx;
                    const T v = (y_in && xi >= 0 && xi < Wi)
                                    ? in_c[(ti * Hi + yi) * Wi + xi]
                                    : T(0);
                    acc += v * k_c[(kt * R + ky) * S + kx];
                  }
                }
              }
            }
            dout[out.offset(b, n, to, yo, xo)] = acc;
          }
    }
  return out;
}

// input [Nb,C,T,H,W] (*) kernels [M,C,K,1,1]: temporal-only mixing, the FSB
// stage-1 shape. Matched oracle for the 1D Winograd path.
template <typename T>
Tensor5<T> conv1d_temporal(const Tensor5<T>& in, const Tensor5<T>& ker,
                           const ConvGeometry& geom) {
  const Dims5& id = in.dims();
  const Dims5& kd = ker.dims();
  const std::int64_t Nb = id[0], C = id[1], Ti = id[2], Hi = id[3], Wi = id[4];
  const std::int64_t M = kd[0], K = kd[2];
  if (kd[1] != C) throw ShapeError("conv1d_temporal: kernel channels != C");
  if (kd[3] != 1 || kd[4] != 1)
    throw ShapeError("conv1d_temporal: spatial kernel extents must be 1");
  if (geom.groups != 1) throw ShapeError("conv1d_temporal: groups must be 1");

  const std::int64_t To = conv_out_extent(Ti, K, geom.pad[0], geom.stride[0]);
  const std::int64_t Ho = conv_out_extent(Hi, 1, geom.pad[1], geom.stride[1]);
  const std::int64_t Wo = conv_out_extent(Wi, 1, geom.pad[2], geom.stride[2]);
  Tensor5<T> out({Nb, M, To, Ho, Wo});

  const T* din = in.data();
  const T* dk = ker.data();
  for (std::int64_t b = 0; b < Nb; ++b)
    for (std::int64_t m = 0; m < M; ++m)
      for (std::int64_t to = 0; to < To; ++to)
        for (std::int64_t yo = 0; yo < Ho; ++yo) {
          const std::int64_t yi = yo * geom.stride[1] - geom.pad[1];
          for (std::int64_t xo = 0; xo < Wo; ++xo) {
            const std::int64_t xi = xo * geom.stride[2] - geom.pad[2];
            const bool yx_in = yi >= 0 && yi < Hi && xi >= 0 && xi < Wi;
            T acc(0);
            for (std::int64_t c = 0; c < C; ++c)
              for (std::int64_t kt = 0; kt < K; ++kt) {
                const std::int64_t ti = to * geom.stride[0] - geom.pad[0] + kt;
                const T v = (yx_in && ti >= 0 && ti < Ti)
                                ? din[in.offset(b, c, ti, yi, xi)]
                                : T(0);
                acc += v * dk[(m * C + c) * K + kt];
              }
            out.at(b, m, to, yo, xo) = acc;
          }
        }
  return out;
}

// input [Nb,M,T,H,W] (*) kernels [M,1,1,R,S] with groups == M: each channel
// convolved with its own 2D kernel, frame by frame.
template <typename T>
Tensor5<T> conv2d_depthwise(const Tensor5<T>& in, const Tensor5<T>& ker,
                            const ConvGeometry& geom) {
  const Dims5& id = in.dims();
  const Dims5& kd = ker.dims();
  const std::int64_t Nb = id[0], M = id[1], Ti = id[2], Hi = id[3], Wi = id[4];
  const std::int64_t R = kd[3], S = kd[4];
  if (geom.groups != M) throw ShapeError("conv2d_depthwise: groups must equal channel count");
  if (kd[0] != M || kd[1] != 1) throw ShapeError("conv2d_depthwise: kernels must be [M,1,1,R,S]");
  if (kd[2] != 1) throw ShapeError("conv2d_depthwise: temporal kernel extent must be 1");
  if (geom.pad[0] != 0 || geom.stride[0] != 1)
    throw ShapeError("conv2d_depthwise: temporal padding/stride not applicable");

  const std::int64_t Ho = conv_out_extent(Hi, R, geom.pad[1], geom.stride[1]);
  const std::int64_t Wo = conv_out_extent(Wi, S, geom.pad[2], geom.stride[2]);
  Tensor5<T> out({Nb, M, Ti, Ho, Wo});

  const T* din = in.data();
  const T* dk = ker.data();
  for (std::int64_t b = 0; b < Nb; ++b)
    for (std::int64_t m = 0; m < M; ++m)
      for (std::int64_t t = 0; t < Ti; ++t) {
        const T* in_f = din + in.offset(b, m, t, 0, 0);
        const T* k_m = dk + m * R * S;
        for (std::int64_t yo = 0; yo < Ho; ++yo)
          for (std::int64_t xo = 0; xo < Wo; ++xo) {
            T acc(0);
            for (std::int64_t ky = 0; ky < R; ++ky) {
              const std::int64_t yi = yo * geom.stride[1] - geom.pad[1] + ky;
              const bool y_in = yi >= 0 && yi < Hi;
              for (std::int64_t kx = 0; kx < S; ++kx) {
                const std::int64_t xi = xo * geom.stride[2] - geom.pad[2] + kx;
                const T v = (y_in && xi >= 0 && xi < Wi) ? in_f[yi * Wi + xi] : T(0);
                acc += v * k_m[ky * S + kx];
              }
            }
            out.at(b, m, t, yo, xo) = acc;
          }
      }
  return out;
}

// input [Nb,M,T,H,W] (*) kernels [N,M,1,1,1]: per-voxel channel remix.
template <typename T>
Tensor5<T> conv_pointwise(const Tensor5<T>& in, const Tensor5<T>& ker) {
  const Dims5& id = in.dims();
  const Dims5& kd = ker.dims();
  const std::int64_t Nb = id[0], M = id[1], Ti = id[2], Hi = id[3], Wi = id[4];
  const std::int64_t N = kd[0];
  if (kd[1] != M) throw ShapeError("conv_pointwise: kernel channels != M");
  if (kd[2] != 1 || kd[3] != 1 || kd[4] != 1)
    throw ShapeError("conv_pointwise: kernel extents must all be 1");

  Tensor5<T> out({Nb, N, Ti, Hi, Wi});
  const std::int64_t voxels = Ti * Hi * Wi;
  const T* din = in.data();
  const T* dk = ker.data();
  T* dout = out.data();
  for (std::int64_t b = 0; b < Nb; ++b)
    for (std::int64_t n = 0; n < N; ++n) {
      T* o = dout + (b * N + n) * voxels;
      for (std::int64_t i = 0; i < voxels; ++i) {
        T acc(0);
        for (std::int64_t m = 0; m < M; ++m)
          acc += din[(b * M + m) * voxels + i] * dk[n * M + m];
        o[i] = acc;
      }
    }
  return out;
}

// Max pooling, no padding.
template <typename T>
Tensor5<T> maxpool3d(const Tensor5<T>& in, std::array<std::int64_t, 3> window,
                     std::array<std::int64_t, 3> stride) {
  const Dims5& id = in.dims();
  const std::int64_t Nb = id[0], C = id[1], Ti = id[2], Hi = id[3], Wi = id[4];
  const std::int64_t To = conv_out_extent(Ti, window[0], 0, stride[0]);
  const std::int64_t Ho = conv_out_extent(Hi, window[1], 0, stride[1]);
  const std::int64_t Wo = conv_out_extent(Wi, window[2], 0, stride[2]);
  Tensor5<T> out({Nb, C, To, Ho, Wo});

  for (std::int64_t b = 0; b < Nb; ++b)
    for (std::int64_t c = 0; c < C; ++c)
      for (std::int64_t to = 0; to < To; ++to)
        for (std::int64_t yo = 0; yo < Ho; ++yo)
          for (std::int64_t xo = 0; xo < Wo; ++xo) {
            T best = in.at(b, c, to * stride[0], yo * stride[1], xo * stride[2]);
            for (std::int64_t kt = 0; kt < window[0]; ++kt)
              for (std::int64_t ky = 0; ky < window[1]; ++ky)
                for (std::int64_t kx = 0; kx < window[2]; ++kx) {
                  const T v = in.at(b, c, to * stride[0] + kt,
                                    yo * stride[1] + ky, xo * stride[2] + kx);
                  if (best < v) best = v;
                }
            out.at(b, c, to, yo, xo) = best;
          }
  return out;
}

}  // namespace ref
}  // namespace fsbconv
