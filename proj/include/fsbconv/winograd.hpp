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
#include <span>
#include <vector>

#include "fsbconv/direct_conv.hpp"
#include "fsbconv/tensor.hpp"
#include "fsbconv/winograd_plan.hpp"

namespace fsbconv {
namespace wino {

namespace detail {

// y[i] = sum_j mat[i, j] * x[j]; matrix constants go through scale() so they
// never contribute to the data-multiplication count.
template <typename T>
inline void apply_mat(const double* mat, int rows, int cols, const T* x, T* y) {
  for (int i = 0; i < rows; ++i) {
    T acc(0);
    const double* row = mat + i * cols;
    for (int j = 0; j < cols; ++j) acc += scale(row[j], x[j]);
    y[i] = acc;
  }
}

// dst(rows x c2) = mat(rows x c1) . src(c1 x c2)
template <typename T>
inline void mat_left(const double* mat, int rows, int c1, const T* src, int c2,
                     T* dst) {
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < c2; ++j) {
      T acc(0);
      for (int k = 0; k < c1; ++k) acc += scale(mat[i * c1 + k], src[k * c2 + j]);
      dst[i * c2 + j] = acc;
    }
}

// dst(r1 x rows) = src(r1 x c1) . mat^T where mat is rows x c1
template <typename T>
inline void mat_right_t(const T* src, int r1, int c1, const double* mat,
                        int rows, T* dst) {
  for (int i = 0; i < r1; ++i)
    for (int j = 0; j < rows; ++j) {
      T acc(0);
      for (int k = 0; k < c1; ++k) acc += scale(mat[j * c1 + k], src[i * c1 + k]);
      dst[i * rows + j] = acc;
    }
}

// Mode-k product on a rank-3 block stored row-major as [e0][e1][e2]: the
// extent along `axis` is replaced by `rows`.
template <typename T>
inline void mode_apply(const double* mat, int rows, int axis,
                       const std::array<int, 3>& ext, const T* src, T* dst) {
  std::array<int, 3> oxt = ext;
  oxt[std::size_t(axis)] = rows;
  const int s1 = ext[2], s0 = ext[1] * ext[2];
  const int stride[3] = {s0, s1, 1};
  for (int i0 = 0; i0 < oxt[0]; ++i0)
    for (int i1 = 0; i1 < oxt[1]; ++i1)
      for (int i2 = 0; i2 < oxt[2]; ++i2) {
        int idx[3] = {i0, i1, i2};
        const int out_i = idx[axis];
        T acc(0);
        for (int j = 0; j < ext[std::size_t(axis)]; ++j) {
          idx[axis] = j;
          acc += scale(mat[out_i * ext[std::size_t(axis)] + j],
                       src[idx[0] * stride[0] + idx[1] * stride[1] + idx[2]]);
        }
        dst[(i0 * oxt[1] + i1) * oxt[2] + i2] = acc;
      }
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return (a + b - 1) / b;
}

}  // namespace detail

/// One 1D tile: y (m) = AT [(G g) (.) (BT d)], g of length r, d of length
/// m+r-1. Exactly m+r-1 data multiplications happen, all in the EWMM.
template <typename T>
void tile1d(const WinogradPlan& p, std::span<const T> g, std::span<const T> d,
            std::span<T> y) {
  const int m = p.m(), r = p.r(), n = p.n();
  if (std::ssize(g) != r || std::ssize(d) != n || std::ssize(y) != m)
    throw ShapeError("tile1d: operand lengths do not match the plan");
  T u[8], v[8], w[8];
  detail::apply_mat(p.g(), n, r, g.data(), u);
  detail::apply_mat(p.bt(), n, n, d.data(), v);
  for (int i = 0; i < n; ++i) w[i] = u[i] * v[i];
  detail::apply_mat(p.at(), m, n, w, y.data());
}

/// One 2D tile: y (m x m) = AT [(G g GT) (.) (BT d B)] A; (m+r-1)^2 data
/// multiplications.
template <typename T>
void tile2d(const WinogradPlan& p, std::span<const T> g, std::span<const T> d,
            std::span<T> y) {
  const int m = p.m(), r = p.r(), n = p.n();
  if (std::ssize(g) != r * r || std::ssize(d) != n * n || std::ssize(y) != m * m)
    throw ShapeError("tile2d: operand extents do not match the plan");
  T t1[64], u[64], v[64], w[64], t2[64];
  detail::mat_left(p.g(), n, r, g.data(), r, t1);      // G g
  detail::mat_right_t(t1, n, r, p.g(), n, u);          // (G g) GT
  detail::mat_left(p.bt(), n, n, d.data(), n, t1);     // BT d
  detail::mat_right_t(t1, n, n, p.bt(), n, v);         // (BT d) B
  for (int i = 0; i < n * n; ++i) w[i] = u[i] * v[i];
  detail::mat_left(p.at(), m, n, w, n, t2);            // AT w
  detail::mat_right_t(t2, m, n, p.at(), m, y.data());  // (AT w) A
}

/// One 3D tile, realized as the separable mode-wise form: BT along each axis
/// of d, G along each axis of g, EWMM, then AT along each axis; (m+r-1)^3
/// data multiplications.
template <typename T>
void tile3d(const WinogradPlan& p, std::span<const T> g, std::span<const T> d,
            std::span<T> y) {
  const int m = p.m(), r = p.r(), n = p.n();
  if (std::ssize(g) != r * r * r || std::ssize(d) != n * n * n ||
      std::ssize(y) != m * m * m)
    throw ShapeError("tile3d: operand extents do not match the plan");
  std::vector<T> u(std::size_t(n * n * n)), v(std::size_t(n * n * n));
  std::vector<T> b1(std::size_t(n * n * n)), b2(std::size_t(n * n * n));

  detail::mode_apply(p.g(), n, 0, {r, r, r}, g.data(), b1.data());
  detail::mode_apply(p.g(), n, 1, {n, r, r}, b1.data(), b2.data());
  detail::mode_apply(p.g(), n, 2, {n, n, r}, b2.data(), u.data());

  detail::mode_apply(p.bt(), n, 0, {n, n, n}, d.data(), b1.data());
  detail::mode_apply(p.bt(), n, 1, {n, n, n}, b1.data(), b2.data());
  detail::mode_apply(p.bt(), n, 2, {n, n, n}, b2.data(), v.data());

  for (int i = 0; i < n * n * n; ++i) b1[std::size_t(i)] = u[std::size_t(i)] * v[std::size_t(i)];

  detail::mode_apply(p.at(), m, 0, {n, n, n}, b1.data(), b2.data());
  detail::mode_apply(p.at(), m, 1, {m, n, n}, b2.data(), b1.data());
  detail::mode_apply(p.at(), m, 2, {m, m, n}, b1.data(), y.data());
}

/// Winograd path for the temporal stage: input [Nb,C,T,H,W], kernels
/// [M,C,K,1,1], stride 1 only. Time is padded on the right to a multiple of
/// m1, tiles overlap by K-1, EWMM products are accumulated over C in the
/// transform domain (ascending channel order), and the result is cropped to
/// the true output extent.
template <typename T>
Tensor5<T> conv1d_temporal(const Tensor5<T>& in, const Tensor5<T>& ker,
                           const WinogradPlan& plan, const ConvGeometry& geom) {
  const Dims5& id = in.dims();
  const Dims5& kd = ker.dims();
  const std::int64_t Nb = id[0], C = id[1], Ti = id[2], H = id[3], W = id[4];
  const std::int64_t M = kd[0], K = kd[2];
  if (geom.stride != std::array<std::int64_t, 3>{1, 1, 1})
    throw UnsupportedError("winograd paths support stride 1 only");
  if (geom.groups != 1) throw ShapeError("wino conv1d_temporal: groups must be 1");
  if (geom.pad[1] != 0 || geom.pad[2] != 0)
    throw ShapeError("wino conv1d_temporal: spatial padding not applicable");
  if (kd[1] != C || kd[3] != 1 || kd[4] != 1)
    throw ShapeError("wino conv1d_temporal: kernels must be [M,C,K,1,1]");
  if (plan.r() != K) throw ShapeError("plan kernel extent does not match K");

  const int m = plan.m(), n = plan.n();
  const std::int64_t To = conv_out_extent(Ti, K, geom.pad[0], 1);
  Tensor5<T> out({Nb, M, To, H, W});
  const std::int64_t tiles = detail::ceil_div(To, m);
  if (out.size() == 0) return out;

  // kernel transform, G g, per (output channel, input channel)
  std::vector<T> U(std::size_t(M * C * n));
  for (std::int64_t mc = 0; mc < M; ++mc)
    for (std::int64_t c = 0; c < C; ++c)
      detail::apply_mat(plan.g(), n, int(K), ker.data() + (mc * C + c) * K,
                        U.data() + (mc * C + c) * n);

  const std::int64_t HW = H * W;
  const T* din = in.data();
  T* dout = out.data();

#pragma omp parallel
  {
    std::vector<T> v(std::size_t(C * n));
    T dseg[8], acc[8], oseg[8];
#pragma omp for collapse(2)
    for (std::int64_t b = 0; b < Nb; ++b)
      for (std::int64_t tt = 0; tt < tiles; ++tt) {
        const std::int64_t t_in0 = tt * m - geom.pad[0];
        for (std::int64_t y = 0; y < H; ++y)
          for (std::int64_t x = 0; x < W; ++x) {
            const std::int64_t yx = y * W + x;
            for (std::int64_t c = 0; c < C; ++c) {
              const T* in_c = din + (b * C + c) * Ti * HW;
              for (int i = 0; i < n; ++i) {
                const std::int64_t ti = t_in0 + i;
                dseg[i] = (ti >= 0 && ti < Ti) ? in_c[ti * HW + yx] : T(0);
              }
              detail::apply_mat(plan.bt(), n, n, dseg, v.data() + c * n);
            }
            for (std::int64_t mc = 0; mc < M; ++mc) {
              for (int i = 0; i < n; ++i) acc[i] = T(0);
              for (std::int64_t c = 0; c < C; ++c) {
                const T* u = U.data() + (mc * C + c) * n;
                const T* vv = v.data() + c * n;
                for (int i = 0; i < n; ++i) acc[i] += u[i] * vv[i];
              }
              detail::apply_mat(plan.at(), m, n, acc, oseg);
              T* out_c = dout + (b * M + mc) * To * HW;
              for (int j = 0; j < m; ++j) {
                const std::int64_t to = tt * m + j;
                if (to < To) out_c[to * HW + yx] = oseg[j];
              }
            }
          }
      }
  }
  return out;
}

/// Winograd path for the depthwise spatial stage: input [Nb,M,T,H,W],
/// kernels [M,1,1,R,R], groups == M, stride 1 only. Every frame and channel
/// tiles the H x W plane independently.
template <typename T>
Tensor5<T> conv2d_depthwise(const Tensor5<T>& in, const Tensor5<T>& ker,
                            const WinogradPlan& plan, const ConvGeometry& geom) {
  const Dims5& id = in.dims();
  const Dims5& kd = ker.dims();
  const std::int64_t Nb = id[0], M = id[1], Ti = id[2], Hi = id[3], Wi = id[4];
  const std::int64_t R = kd[3], S = kd[4];
  if (geom.stride != std::array<std::int64_t, 3>{1, 1, 1})
    throw UnsupportedError("winograd paths support stride 1 only");
  if (R != S) throw UnsupportedError("wino conv2d_depthwise: kernels must be square");
  if (geom.groups != M) throw ShapeError("wino conv2d_depthwise: groups must equal M");
  if (kd[0] != M || kd[1] != 1 || kd[2] != 1)
    throw ShapeError("wino conv2d_depthwise: kernels must be [M,1,1,R,R]");
  if (geom.pad[0] != 0) throw ShapeError("wino conv2d_depthwise: temporal padding not applicable");
  if (plan.r() != R) throw ShapeError("plan kernel extent does not match R");

  const int m = plan.m(), n = plan.n();
  const std::int64_t Ho = conv_out_extent(Hi, R, geom.pad[1], 1);
  const std::int64_t Wo = conv_out_extent(Wi, S, geom.pad[2], 1);
  Tensor5<T> out({Nb, M, Ti, Ho, Wo});
  const std::int64_t tiles_y = detail::ceil_div(Ho, m);
  const std::int64_t tiles_x = detail::ceil_div(Wo, m);
  if (out.size() == 0) return out;

  // kernel transform, G g GT, per channel
  std::vector<T> U(std::size_t(M * n * n));
  {
    std::vector<T> tmp(std::size_t(n * R));
    for (std::int64_t c = 0; c < M; ++c) {
      detail::mat_left(plan.g(), n, int(R), ker.data() + c * R * S, int(R), tmp.data());
      detail::mat_right_t(tmp.data(), n, int(R), plan.g(), n, U.data() + c * n * n);
    }
  }

  const T* din = in.data();
  T* dout = out.data();

#pragma omp parallel for collapse(3)
  for (std::int64_t b = 0; b < Nb; ++b)
    for (std::int64_t c = 0; c < M; ++c)
      for (std::int64_t t = 0; t < Ti; ++t) {
        const T* in_f = din + in.offset(b, c, t, 0, 0);
        T* out_f = dout + out.offset(b, c, t, 0, 0);
        const T* u = U.data() + c * n * n;
        T d[64], t1[64], v[64], o[64];
        for (std::int64_t ty = 0; ty < tiles_y; ++ty)
          for (std::int64_t tx = 0; tx < tiles_x; ++tx) {
            const std::int64_t y0 = ty * m - geom.pad[1];
            const std::int64_t x0 = tx * m - geom.pad[2];
            for (int i = 0; i < n; ++i) {
              const std::int64_t yi = y0 + i;
              const bool y_in = yi >= 0 && yi < Hi;
              for (int j = 0; j < n; ++j) {
                const std::int64_t xi = x0 + j;
                d[i * n + j] = (y_in && xi >= 0 && xi < Wi) ? in_f[yi * Wi + xi] : T(0);
              }
            }
            detail::mat_left(plan.bt(), n, n, d, n, t1);
            detail::mat_right_t(t1, n, n, plan.bt(), n, v);
            for (int i = 0; i < n * n; ++i) v[i] = u[i] * v[i];
            detail::mat_left(plan.at(), m, n, v, n, t1);
            detail::mat_right_t(t1, m, n, plan.at(), m, o);
            for (int i = 0; i < m; ++i) {
              const std::int64_t yo = ty * m + i;
              if (yo >= Ho) break;
              for (int j = 0; j < m; ++j) {
                const std::int64_t xo = tx * m + j;
                if (xo < Wo) out_f[yo * Wo + xo] = o[i * m + j];
              }
            }
          }
      }
  return out;
}

/// Full 3D Winograd path: input [Nb,C,T,H,W], kernels [N,C,K,K,K] (cubic
/// only), stride 1 only, tiles along all three axes.
template <typename T>
Tensor5<T> conv3d(const Tensor5<T>& in, const Tensor5<T>& ker,
                  const WinogradPlan& plan, const ConvGeometry& geom) {
  const Dims5& id = in.dims();
  const Dims5& kd = ker.dims();
  const std::int64_t Nb = id[0], C = id[1], Ti = id[2], Hi = id[3], Wi = id[4];
  const std::int64_t N = kd[0], K = kd[2];
  if (geom.stride != std::array<std::int64_t, 3>{1, 1, 1})
    throw UnsupportedError("winograd paths support stride 1 only");
  if (kd[2] != kd[3] || kd[3] != kd[4])
    throw UnsupportedError("wino conv3d: kernels must be cubic (K=R=S)");
  if (geom.groups != 1) throw ShapeError("wino conv3d: groups must be 1");
  if (kd[1] != C) throw ShapeError("wino conv3d: kernel channels != C");
  if (plan.r() != K) throw ShapeError("plan kernel extent does not match K");

  const int m = plan.m(), n = plan.n();
  const int n3 = n * n * n, m3 = m * m * m;
  const std::int64_t To = conv_out_extent(Ti, K, geom.pad[0], 1);
  const std::int64_t Ho = conv_out_extent(Hi, K, geom.pad[1], 1);
  const std::int64_t Wo = conv_out_extent(Wi, K, geom.pad[2], 1);
  Tensor5<T> out({Nb, N, To, Ho, Wo});
  const std::int64_t tt_n = detail::ceil_div(To, m);
  const std::int64_t ty_n = detail::ceil_div(Ho, m);
  const std::int64_t tx_n = detail::ceil_div(Wo, m);
  const std::int64_t tiles = tt_n * ty_n * tx_n;
  if (out.size() == 0) return out;

  // kernel transform, G applied along each axis
  std::vector<T> U(std::size_t(N * C) * std::size_t(n3));
  {
    const int k = int(K);
    std::vector<T> b1(std::size_t(n * k * k)), b2(std::size_t(n * n * k));
    for (std::int64_t nc = 0; nc < N * C; ++nc) {
      const T* src = ker.data() + nc * K * K * K;
      detail::mode_apply(plan.g(), n, 0, {k, k, k}, src, b1.data());
      detail::mode_apply(plan.g(), n, 1, {n, k, k}, b1.data(), b2.data());
      detail::mode_apply(plan.g(), n, 2, {n, n, k}, b2.data(), U.data() + nc * n3);
    }
  }

  const T* din = in.data();
  T* dout = out.data();

#pragma omp parallel
  {
    std::vector<T> v(std::size_t(C) * std::size_t(n3));
    std::vector<T> d(static_cast<std::size_t>(n3)), b1(static_cast<std::size_t>(n3)),
        b2(static_cast<std::size_t>(n3)), acc(static_cast<std::size_t>(n3)),
        o(static_cast<std::size_t>(m3)), ob(static_cast<std::size_t>(n3));
#pragma omp for collapse(2)
    for (std::int64_t b = 0; b < Nb; ++b)
      for (std::int64_t tile = 0; tile < tiles; ++tile) {
        const std::int64_t it = tile / (ty_n * tx_n);
        const std::int64_t iy = (tile / tx_n) % ty_n;
        const std::int64_t ix = tile % tx_n;
        const std::int64_t t0 = it * m - geom.pad[0];
        const std::int64_t y0 = iy * m - geom.pad[1];
        const std::int64_t x0 = ix * m - geom.pad[2];

        for (std::int64_t c = 0; c < C; ++c) {
          const T* in_c = din + (b * C + c) * Ti * Hi * Wi;
          for (int i = 0; i < n; ++i) {
            const std::int64_t ti = t0 + i;
            const bool t_in = ti >= 0 && ti < Ti;
            for (int j = 0; j < n; ++j) {
              const std::int64_t yi = y0 + j;
              const bool y_in = t_in && yi >= 0 && yi < Hi;
              for (int l = 0; l < n; ++l) {
                const std::int64_t xi = x0 + l;
                d[std::size_t((i * n + j) * n + l)] =
                    (y_in && xi >= 0 && xi < Wi) ? in_c[(ti * Hi + yi) * Wi + xi] : T(0);
              }
            }
          }
          detail::mode_apply(plan.bt(), n, 0, {n, n, n}, d.data(), b1.data());
          detail::mode_apply(plan.bt(), n, 1, {n, n, n}, b1.data(), b2.data());
          detail::mode_apply(plan.bt(), n, 2, {n, n, n}, b2.data(), v.data() + c * n3);
        }

        for (std::int64_t nc = 0; nc < N; ++nc) {
          for (int i = 0; i < n3; ++i) acc[std::size_t(i)] = T(0);
          for (std::int64_t c = 0; c < C; ++c) {
            const T* u = U.data() + (nc * C + c) * n3;
            const T* vv = v.data() + c * n3;
            for (int i = 0; i < n3; ++i) acc[std::size_t(i)] += u[i] * vv[i];
          }
          detail::mode_apply(plan.at(), m, 0, {n, n, n}, acc.data(), ob.data());
          detail::mode_apply(plan.at(), m, 1, {m, n, n}, ob.data(), b1.data());
          detail::mode_apply(plan.at(), m, 2, {m, m, n}, b1.data(), o.data());

          T* out_c = dout + (b * N + nc) * To * Ho * Wo;
          for (int i = 0; i < m; ++i) {
            const std::int64_t to = it * m + i;
            if (to >= To) break;
            for (int j = 0; j < m; ++j) {
              const std::int64_t yo = iy * m + j;
              if (yo >= Ho) break;
              for (int l = 0; l < m; ++l) {
                const std::int64_t xo = ix * m + l;
                if (xo < Wo)
                  out_c[(to * Ho + yo) * Wo + xo] = o[std::size_t((i * m + j) * m + l)];
              }
            }
          }
        }
      }
  }
  return out;
}

}  // namespace wino
}  // namespace fsbconv
