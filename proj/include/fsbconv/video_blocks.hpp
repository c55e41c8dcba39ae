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

#include "fsbconv/direct_conv.hpp"
#include "fsbconv/tensor.hpp"
#include "fsbconv/winograd.hpp"
#include "fsbconv/winograd_plan.hpp"

namespace fsbconv {

/// Temporal residual gradient. Frames 0..T-2 of the output are the adjacent
/// differences d[t+1] - d[t]; the last frame is the mean over the T input
/// frames (appended last, a fixed order). Subtraction and constant scaling
/// only -- zero data multiplications.
template <typename T>
Tensor5<T> trg_forward(const Tensor5<T>& in) {
  const Dims5& id = in.dims();
  const std::int64_t Nb = id[0], C = id[1], Ti = id[2], H = id[3], W = id[4];
  if (Ti < 2) throw ShapeError("trg_forward: temporal extent must be >= 2");
  Tensor5<T> out(id);
  const std::int64_t HW = H * W;
  const T* din = in.data();
  T* dout = out.data();
  const double inv_t = 1.0 / double(Ti);

#pragma omp parallel for collapse(2)
  for (std::int64_t b = 0; b < Nb; ++b)
    for (std::int64_t c = 0; c < C; ++c) {
      const T* in_c = din + (b * C + c) * Ti * HW;
      T* out_c = dout + (b * C + c) * Ti * HW;
      for (std::int64_t t = 0; t + 1 < Ti; ++t)
        for (std::int64_t i = 0; i < HW; ++i)
          out_c[t * HW + i] = in_c[(t + 1) * HW + i] - in_c[t * HW + i];
      for (std::int64_t i = 0; i < HW; ++i) {
        T sum(0);
        for (std::int64_t t = 0; t < Ti; ++t) sum += in_c[t * HW + i];
        out_c[(Ti - 1) * HW + i] = scale(inv_t, sum);
      }
    }
  return out;
}

/// The three FSB stages: temporal bottleneck [M,C,K,1,1], depthwise spatial
/// [M,1,1,R,S] with M groups, pointwise [N,M,1,1,1].
template <typename T>
struct FsbWeights {
  Tensor5<T> stage1;
  Tensor5<T> stage2;
  Tensor5<T> stage3;

  std::int64_t c() const { return stage1.dim(1); }
  std::int64_t m() const { return stage1.dim(0); }
  std::int64_t n() const { return stage3.dim(0); }
  std::int64_t k() const { return stage1.dim(2); }
  std::int64_t r() const { return stage2.dim(3); }
  std::int64_t s() const { return stage2.dim(4); }

  std::int64_t param_count() const {
    return m() * c() * k() + m() * r() * s() + n() * m();
  }

  void validate() const {
    if (stage1.dim(3) != 1 || stage1.dim(4) != 1)
      throw ShapeError("FsbWeights: stage1 must be [M,C,K,1,1]");
    if (stage2.dim(0) != m() || stage2.dim(1) != 1 || stage2.dim(2) != 1)
      throw ShapeError("FsbWeights: stage2 must be [M,1,1,R,S]");
    if (stage3.dim(1) != m() || stage3.dim(2) != 1 || stage3.dim(3) != 1 ||
        stage3.dim(4) != 1)
      throw ShapeError("FsbWeights: stage3 must be [N,M,1,1,1]");
    if (k() % 2 == 0 || r() % 2 == 0 || s() % 2 == 0)
      throw ShapeError("FsbWeights: kernel extents must be odd for same padding");
  }

  static FsbWeights random(std::int64_t C, std::int64_t M, std::int64_t N,
                           std::int64_t K, std::int64_t R, std::int64_t S,
                           std::uint64_t seed) {
    SplitMix64 mix(seed);
    FsbWeights w{Tensor5<T>::random({M, C, K, 1, 1}, mix.next()),
                 Tensor5<T>::random({M, 1, 1, R, S}, mix.next()),
                 Tensor5<T>::random({N, M, 1, 1, 1}, mix.next())};
    w.validate();
    return w;
  }
};

/// Direct FSB forward: temporal conv, depthwise spatial conv, pointwise conv,
/// each stride 1 with "same" zero padding so (T, H, W) are preserved. No
/// nonlinearity or normalization inside the block.
template <typename T>
Tensor5<T> fsb_forward(const Tensor5<T>& in, const FsbWeights<T>& w) {
  w.validate();
  if (in.dim(1) != w.c()) throw ShapeError("fsb_forward: input channels != C");
  ConvGeometry g1;
  g1.pad = {(w.k() - 1) / 2, 0, 0};
  Tensor5<T> s1 = ref::conv1d_temporal(in, w.stage1, g1);
  ConvGeometry g2;
  g2.pad = {0, (w.r() - 1) / 2, (w.s() - 1) / 2};
  g2.groups = w.m();
  Tensor5<T> s2 = ref::conv2d_depthwise(s1, w.stage2, g2);
  return ref::conv_pointwise(s2, w.stage3);
}

/// Winograd FSB forward: F(m1,K) on the temporal stage, F(m2 x m2, R x R) on
/// the depthwise stage, plain pointwise for stage 3 (a 1x1x1 kernel has no
/// Winograd gain). Same result as fsb_forward up to round-off.
template <typename T>
Tensor5<T> hfa_fsb_forward(const Tensor5<T>& in, const FsbWeights<T>& w,
                           const HybridPlan& hp) {
  w.validate();
  if (in.dim(1) != w.c()) throw ShapeError("hfa_fsb_forward: input channels != C");
  if (w.r() != w.s())
    throw UnsupportedError("hfa_fsb_forward: spatial kernels must be square");
  if (hp.temporal.r() != w.k() || hp.spatial.r() != w.r())
    throw ShapeError("hfa_fsb_forward: plan extents do not match the weights");
  ConvGeometry g1;
  g1.pad = {(w.k() - 1) / 2, 0, 0};
  Tensor5<T> s1 = wino::conv1d_temporal(in, w.stage1, hp.temporal, g1);
  ConvGeometry g2;
  g2.pad = {0, (w.r() - 1) / 2, (w.s() - 1) / 2};
  g2.groups = w.m();
  Tensor5<T> s2 = wino::conv2d_depthwise(s1, w.stage2, hp.spatial, g2);
  return ref::conv_pointwise(s2, w.stage3);
}

template <typename T>
Tensor5<T> relu_forward(const Tensor5<T>& in) {
  Tensor5<T> out(in.dims());
  for (std::int64_t i = 0; i < in.size(); ++i) {
    const T v = in.data()[std::size_t(i)];
    out.data()[std::size_t(i)] = (v < T(0)) ? T(0) : v;
  }
  return out;
}

}  // namespace fsbconv
