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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "fsbconv/counted.hpp"
#include "fsbconv/direct_conv.hpp"
#include "fsbconv/winograd.hpp"

using namespace fsbconv;

namespace {

// Valid cross-correlation oracles on raw buffers.
std::vector<double> correlate2d(const std::vector<double>& g, int r,
                                const std::vector<double>& d, int n) {
  const int m = n - r + 1;
  std::vector<double> y(std::size_t(m * m), 0.0);
  for (int ty = 0; ty < m; ++ty)
    for (int tx = 0; tx < m; ++tx)
      for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
          y[std::size_t(ty * m + tx)] +=
              g[std::size_t(i * r + j)] * d[std::size_t((ty + i) * n + tx + j)];
  return y;
}

std::vector<double> correlate3d(const std::vector<double>& g, int r,
                                const std::vector<double>& d, int n) {
  const int m = n - r + 1;
  std::vector<double> y(std::size_t(m * m * m), 0.0);
  for (int tt = 0; tt < m; ++tt)
    for (int ty = 0; ty < m; ++ty)
      for (int tx = 0; tx < m; ++tx)
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j)
            for (int l = 0; l < r; ++l)
              y[std::size_t((tt * m + ty) * m + tx)] +=
                  g[std::size_t((i * r + j) * r + l)] *
                  d[std::size_t(((tt + i) * n + ty + j) * n + tx + l)];
  return y;
}

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.next_f64();
  return v;
}

// Kronecker product of k copies of a rows x cols matrix, row-major.
std::vector<double> kron_pow(const double* mat, int rows, int cols, int k) {
  std::vector<double> cur = {1.0};
  int cr = 1, cc = 1;
  for (int rep = 0; rep < k; ++rep) {
    std::vector<double> next(std::size_t(cr * rows) * std::size_t(cc * cols));
    for (int i = 0; i < cr; ++i)
      for (int j = 0; j < cc; ++j)
        for (int a = 0; a < rows; ++a)
          for (int b = 0; b < cols; ++b)
            next[std::size_t((i * rows + a) * (cc * cols) + (j * cols + b))] =
                cur[std::size_t(i * cc + j)] * mat[a * cols + b];
    cur = std::move(next);
    cr *= rows;
    cc *= cols;
  }
  return cur;
}

std::vector<double> matvec(const std::vector<double>& m, int rows, int cols,
                           const std::vector<double>& x) {
  std::vector<double> y(std::size_t(rows), 0.0);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) y[std::size_t(i)] += m[std::size_t(i * cols + j)] * x[std::size_t(j)];
  return y;
}

}  // namespace

TEST_CASE("tile1d F(2,3) hand values") {
  const auto p = cook_toom_plan(2, 3);
  const std::vector<double> g = {1, 2, 1}, d = {1, 2, 3, 4};
  std::vector<double> y(2);
  wino::tile1d<double>(p, g, d, y);
  CHECK(y[0] == doctest::Approx(8.0));
  CHECK(y[1] == doctest::Approx(12.0));

  // one-hot filter at index 0 copies the first m entries of d
  const std::vector<double> hot = {1, 0, 0};
  wino::tile1d<double>(p, hot, d, y);
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(2.0));

  const std::vector<double> zero = {0, 0, 0};
  wino::tile1d<double>(p, zero, d, y);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);

  std::vector<double> bad(3);
  CHECK_THROWS_AS(wino::tile1d<double>(p, g, g, bad), ShapeError);
}

TEST_CASE("tile2d matches direct 2D correlation") {
  for (int m : {2, 3}) {
    const auto p = cook_toom_plan(m, 3);
    const int n = p.n();
    const auto g = random_vec(9, 31);
    const auto d = random_vec(std::size_t(n * n), 32);
    std::vector<double> y(std::size_t(m * m));
    wino::tile2d<double>(p, g, d, y);
    const auto want = correlate2d(g, 3, d, n);
    for (std::size_t i = 0; i < y.size(); ++i)
      CHECK(y[i] == doctest::Approx(want[i]).epsilon(1e-10));
  }

  // center delta kernel selects the central m x m block
  const auto p = cook_toom_plan(2, 3);
  std::vector<double> delta(9, 0.0);
  delta[4] = 1.0;
  const auto d = random_vec(16, 33);
  std::vector<double> y(4);
  wino::tile2d<double>(p, delta, d, y);
  CHECK(y[0] == doctest::Approx(d[1 * 4 + 1]));
  CHECK(y[1] == doctest::Approx(d[1 * 4 + 2]));
  CHECK(y[2] == doctest::Approx(d[2 * 4 + 1]));
  CHECK(y[3] == doctest::Approx(d[2 * 4 + 2]));
}

TEST_CASE("tile3d matches direct 3D correlation") {
  const auto p = cook_toom_plan(2, 3);
  const int n = p.n();
  const auto g = random_vec(27, 41);
  const auto d = random_vec(std::size_t(n * n * n), 42);
  std::vector<double> y(8);
  wino::tile3d<double>(p, g, d, y);
  const auto want = correlate3d(g, 3, d, n);
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(y[i] == doctest::Approx(want[i]).epsilon(1e-10));

  // center delta cube selects the central m^3 subcube
  std::vector<double> delta(27, 0.0);
  delta[13] = 1.0;  // (1,1,1)
  wino::tile3d<double>(p, delta, d, y);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        CHECK(y[std::size_t((a * 2 + b) * 2 + c)] ==
              doctest::Approx(d[std::size_t(((a + 1) * n + b + 1) * n + c + 1)]));
}

TEST_CASE("tile EWMM multiplication counts: 4 / 16 / 64 for F(2,3)") {
  const auto p = cook_toom_plan(2, 3);

  std::vector<Counted> g1(3, Counted(0.5)), d1(4, Counted(0.25)), y1(2);
  MulCounter::reset();
  wino::tile1d<Counted>(p, g1, d1, y1);
  CHECK(MulCounter::value() == 4);

  std::vector<Counted> g2(9, Counted(0.5)), d2(16, Counted(0.25)), y2(4);
  MulCounter::reset();
  wino::tile2d<Counted>(p, g2, d2, y2);
  CHECK(MulCounter::value() == 16);

  std::vector<Counted> g3(27, Counted(0.5)), d3(64, Counted(0.25)), y3(8);
  MulCounter::reset();
  wino::tile3d<Counted>(p, g3, d3, y3);
  CHECK(MulCounter::value() == 64);

  // direct tile correlations for comparison: 6 / 36 / 216
  MulCounter::reset();
  for (int t = 0; t < 2; ++t) {
    Counted acc(0);
    for (int s = 0; s < 3; ++s) acc += g1[std::size_t(s)] * d1[std::size_t(t + s)];
  }
  CHECK(MulCounter::value() == 6);

  MulCounter::reset();
  for (int ty = 0; ty < 2; ++ty)
    for (int tx = 0; tx < 2; ++tx) {
      Counted acc(0);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          acc += g2[std::size_t(i * 3 + j)] * d2[std::size_t((ty + i) * 4 + tx + j)];
    }
  CHECK(MulCounter::value() == 36);

  MulCounter::reset();
  for (int tt = 0; tt < 2; ++tt)
    for (int ty = 0; ty < 2; ++ty)
      for (int tx = 0; tx < 2; ++tx) {
        Counted acc(0);
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            for (int l = 0; l < 3; ++l)
              acc += g3[std::size_t((i * 3 + j) * 3 + l)] *
                     d3[std::size_t(((tt + i) * 4 + ty + j) * 4 + tx + l)];
      }
  CHECK(MulCounter::value() == 216);
}

TEST_CASE("tile EWMM counts are n, n^2, n^3 for every plan") {
  for (auto [m, r] : {std::pair{2, 3}, {3, 3}, {2, 5}}) {
    const auto p = cook_toom_plan(m, r);
    const std::uint64_t n = std::uint64_t(p.n());
    std::vector<Counted> g1(std::size_t(r), Counted(1)), d1(n, Counted(1));
    std::vector<Counted> y1(static_cast<std::size_t>(m));
    MulCounter::reset();
    wino::tile1d<Counted>(p, g1, d1, y1);
    CHECK(MulCounter::value() == n);

    std::vector<Counted> g2(std::size_t(r * r), Counted(1)), d2(n * n, Counted(1));
    std::vector<Counted> y2(static_cast<std::size_t>(m * m));
    MulCounter::reset();
    wino::tile2d<Counted>(p, g2, d2, y2);
    CHECK(MulCounter::value() == n * n);

    std::vector<Counted> g3(std::size_t(r * r * r), Counted(1)),
        d3(n * n * n, Counted(1));
    std::vector<Counted> y3(static_cast<std::size_t>(m * m * m));
    MulCounter::reset();
    wino::tile3d<Counted>(p, g3, d3, y3);
    CHECK(MulCounter::value() == n * n * n);
  }
}

TEST_CASE("nesting identity: tile2d/tile3d equal the Kronecker form") {
  for (int m : {2, 3}) {
    const auto p = cook_toom_plan(m, 3);
    const int n = p.n(), r = p.r();

    const auto at2 = kron_pow(p.at(), m, n, 2);
    const auto g2m = kron_pow(p.g(), n, r, 2);
    const auto bt2 = kron_pow(p.bt(), n, n, 2);
    const auto g = random_vec(std::size_t(r * r), 51);
    const auto d = random_vec(std::size_t(n * n), 52);
    const auto u = matvec(g2m, n * n, r * r, g);
    const auto v = matvec(bt2, n * n, n * n, d);
    std::vector<double> w(std::size_t(n * n));
    for (int i = 0; i < n * n; ++i) w[std::size_t(i)] = u[std::size_t(i)] * v[std::size_t(i)];
    const auto want = matvec(at2, m * m, n * n, w);

    std::vector<double> y(std::size_t(m * m));
    wino::tile2d<double>(p, g, d, y);
    for (std::size_t i = 0; i < y.size(); ++i)
      CHECK(y[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }

  const auto p = cook_toom_plan(2, 3);
  const int n = p.n(), r = p.r(), m = p.m();
  const auto at3 = kron_pow(p.at(), m, n, 3);
  const auto g3m = kron_pow(p.g(), n, r, 3);
  const auto bt3 = kron_pow(p.bt(), n, n, 3);
  const auto g = random_vec(std::size_t(r * r * r), 53);
  const auto d = random_vec(std::size_t(n * n * n), 54);
  const auto u = matvec(g3m, n * n * n, r * r * r, g);
  const auto v = matvec(bt3, n * n * n, n * n * n, d);
  std::vector<double> w(std::size_t(n * n * n));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] * v[i];
  const auto want = matvec(at3, m * m * m, n * n * n, w);
  std::vector<double> y(std::size_t(m * m * m));
  wino::tile3d<double>(p, g, d, y);
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK(y[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("wino conv1d_temporal equals the reference") {
  const auto plan = cook_toom_plan(2, 3);
  const auto in = Tensor5<double>::random({1, 4, 16, 6, 6}, 61);
  const auto ker = Tensor5<double>::random({8, 4, 3, 1, 1}, 62);
  ConvGeometry g;
  g.pad = {1, 0, 0};
  const auto want = ref::conv1d_temporal(in, ker, g);
  const auto got = wino::conv1d_temporal(in, ker, plan, g);
  CHECK(allclose(want, got, 1e-12, 1e-13).ok);

  // f32 instantiation
  const auto inf = in.cast<float>();
  const auto kerf = ker.cast<float>();
  CHECK(allclose(ref::conv1d_temporal(inf, kerf, g),
                 wino::conv1d_temporal(inf, kerf, plan, g), 1e-4, 1e-5).ok);
}

TEST_CASE("wino conv1d_temporal pad-and-crop when T is not a tile multiple") {
  const auto plan = cook_toom_plan(2, 3);
  const auto in = Tensor5<double>::random({1, 2, 9, 2, 2}, 63);  // T' = 7 with pad 0
  const auto ker = Tensor5<double>::random({3, 2, 3, 1, 1}, 64);
  ConvGeometry g;
  const auto want = ref::conv1d_temporal(in, ker, g);
  CHECK(want.dim(2) == 7);
  CHECK(allclose(want, wino::conv1d_temporal(in, ker, plan, g), 1e-12, 1e-13).ok);
}

TEST_CASE("wino conv1d_temporal delta kernel is the identity") {
  const auto plan = cook_toom_plan(2, 3);
  const auto in = Tensor5<double>::random({1, 1, 8, 3, 3}, 65);
  Tensor5<double> ker({1, 1, 3, 1, 1}, 0.0);
  ker.data()[1] = 1.0;  // center tap
  ConvGeometry g;
  g.pad = {1, 0, 0};
  CHECK(allclose(in, wino::conv1d_temporal(in, ker, plan, g), 1e-12, 1e-13).ok);
}

TEST_CASE("wino paths refuse stride != 1") {
  const auto plan = cook_toom_plan(2, 3);
  const auto in = Tensor5<double>::random({1, 2, 8, 8, 8}, 66);
  const auto k1 = Tensor5<double>::random({2, 2, 3, 1, 1}, 67);
  ConvGeometry g;
  g.stride = {2, 1, 1};
  CHECK_THROWS_AS(wino::conv1d_temporal(in, k1, plan, g), UnsupportedError);

  const auto k2 = Tensor5<double>::random({2, 1, 1, 3, 3}, 68);
  ConvGeometry g2;
  g2.stride = {1, 2, 2};
  g2.groups = 2;
  CHECK_THROWS_AS(wino::conv2d_depthwise(in, k2, plan, g2), UnsupportedError);

  const auto k3 = Tensor5<double>::random({2, 2, 3, 3, 3}, 69);
  CHECK_THROWS_AS(wino::conv3d(in, k3, plan, g), UnsupportedError);
}

TEST_CASE("wino conv2d_depthwise equals the reference") {
  const auto plan = cook_toom_plan(2, 3);
  const auto in = Tensor5<double>::random({1, 16, 4, 14, 14}, 71);
  const auto ker = Tensor5<double>::random({16, 1, 1, 3, 3}, 72);
  ConvGeometry g;
  g.pad = {0, 1, 1};
  g.groups = 16;
  CHECK(allclose(ref::conv2d_depthwise(in, ker, g),
                 wino::conv2d_depthwise(in, ker, plan, g), 1e-12, 1e-13).ok);

  const auto inf = in.cast<float>();
  const auto kerf = ker.cast<float>();
  CHECK(allclose(ref::conv2d_depthwise(inf, kerf, g),
                 wino::conv2d_depthwise(inf, kerf, plan, g), 1e-4, 1e-5).ok);
}

TEST_CASE("wino conv2d_depthwise edge tile larger than half the plane") {
  const auto plan = cook_toom_plan(4, 3);  // m=4 tiles on a 5x5 plane
  const auto in = Tensor5<double>::random({1, 3, 2, 5, 5}, 73);
  const auto ker = Tensor5<double>::random({3, 1, 1, 3, 3}, 74);
  ConvGeometry g;
  g.pad = {0, 1, 1};
  g.groups = 3;
  CHECK(allclose(ref::conv2d_depthwise(in, ker, g),
                 wino::conv2d_depthwise(in, ker, plan, g), 1e-12, 1e-13).ok);
}

TEST_CASE("wino conv2d_depthwise delta kernels are the identity") {
  const auto plan = cook_toom_plan(2, 3);
  const auto in = Tensor5<double>::random({1, 2, 3, 6, 6}, 75);
  Tensor5<double> ker({2, 1, 1, 3, 3}, 0.0);
  ker.data()[4] = 1.0;
  ker.data()[9 + 4] = 1.0;
  ConvGeometry g;
  g.pad = {0, 1, 1};
  g.groups = 2;
  CHECK(allclose(in, wino::conv2d_depthwise(in, ker, plan, g), 1e-12, 1e-13).ok);

  // non-square kernels are refused
  const auto bad = Tensor5<double>::random({2, 1, 1, 3, 5}, 76);
  CHECK_THROWS_AS(wino::conv2d_depthwise(in, bad, plan, g), UnsupportedError);
}

TEST_CASE("wino conv3d equals the reference") {
  const auto plan = cook_toom_plan(2, 3);
  const auto in = Tensor5<double>::random({1, 4, 8, 8, 8}, 81);
  const auto ker = Tensor5<double>::random({4, 4, 3, 3, 3}, 82);
  ConvGeometry g;
  g.pad = {1, 1, 1};
  CHECK(allclose(ref::conv3d_direct(in, ker, g), wino::conv3d(in, ker, plan, g),
                 1e-12, 1e-13).ok);

  const auto inf = in.cast<float>();
  const auto kerf = ker.cast<float>();
  CHECK(allclose(ref::conv3d_direct(inf, kerf, g), wino::conv3d(inf, kerf, plan, g),
                 1e-4, 1e-5).ok);

  // zero kernels annihilate
  const Tensor5<double> zk({2, 4, 3, 3, 3}, 0.0);
  const auto out = wino::conv3d(in, zk, plan, g);
  for (std::int64_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == 0.0);

  // non-cubic kernels are refused
  const auto bad = Tensor5<double>::random({2, 4, 3, 3, 1}, 83);
  CHECK_THROWS_AS(wino::conv3d(in, bad, plan, g), UnsupportedError);
}

TEST_CASE("wino conv3d single tile equals tile3d composed over channels") {
  const auto plan = cook_toom_plan(2, 3);
  const int n = plan.n();
  const std::int64_t C = 3, N = 2;
  const auto in = Tensor5<double>::random({1, C, n, n, n}, 84);
  const auto ker = Tensor5<double>::random({N, C, 3, 3, 3}, 85);
  const auto got = wino::conv3d(in, ker, plan, ConvGeometry{});
  REQUIRE(got.dims() == Dims5{1, N, 2, 2, 2});

  for (std::int64_t nc = 0; nc < N; ++nc) {
    std::vector<double> acc(8, 0.0);
    for (std::int64_t c = 0; c < C; ++c) {
      std::vector<double> g(27), d(std::size_t(n * n * n)), y(8);
      for (int i = 0; i < 27; ++i) g[std::size_t(i)] = ker.data()[(nc * C + c) * 27 + i];
      for (int i = 0; i < n * n * n; ++i) d[std::size_t(i)] = in.data()[c * n * n * n + i];
      wino::tile3d<double>(plan, g, d, y);
      for (int i = 0; i < 8; ++i) acc[std::size_t(i)] += y[std::size_t(i)];
    }
    for (int i = 0; i < 8; ++i)
      CHECK(got.data()[nc * 8 + i] == doctest::Approx(acc[std::size_t(i)]).epsilon(1e-10));
  }
}

TEST_CASE("tiling transparency: m=2 and m=4 plans agree") {
  const auto p2 = cook_toom_plan(2, 3);
  const auto p4 = cook_toom_plan(4, 3);
  const auto in = Tensor5<double>::random({1, 3, 10, 11, 13}, 86);
  const auto k1 = Tensor5<double>::random({4, 3, 3, 1, 1}, 87);
  ConvGeometry g1;
  g1.pad = {1, 0, 0};
  CHECK(allclose(wino::conv1d_temporal(in, k1, p2, g1),
                 wino::conv1d_temporal(in, k1, p4, g1), 1e-10, 1e-12).ok);

  const auto k2 = Tensor5<double>::random({3, 1, 1, 3, 3}, 88);
  ConvGeometry g2;
  g2.pad = {0, 1, 1};
  g2.groups = 3;
  CHECK(allclose(wino::conv2d_depthwise(in, k2, p2, g2),
                 wino::conv2d_depthwise(in, k2, p4, g2), 1e-10, 1e-12).ok);
}

TEST_CASE("full-map EWMM counts match the ceil-tiled closed forms") {
  const auto plan = cook_toom_plan(2, 3);

  // 1D: M*C*H*W*ceil(T'/m)*n
  {
    const std::int64_t C = 3, M = 5, T = 9, H = 4, W = 3;  // T' = 9 with same pad
    const auto in = Tensor5<double>::random({1, C, T, H, W}, 91).cast<Counted>();
    const auto ker = Tensor5<double>::random({M, C, 3, 1, 1}, 92).cast<Counted>();
    ConvGeometry g;
    g.pad = {1, 0, 0};
    MulCounter::reset();
    wino::conv1d_temporal(in, ker, plan, g);
    CHECK(MulCounter::value() == std::uint64_t(M * C * H * W * ((T + 1) / 2) * 4));
  }

  // 2D: M*T*ceil(H'/m)*ceil(W'/m)*n^2
  {
    const std::int64_t M = 4, T = 2, H = 7, W = 5;
    const auto in = Tensor5<double>::random({1, M, T, H, W}, 93).cast<Counted>();
    const auto ker = Tensor5<double>::random({M, 1, 1, 3, 3}, 94).cast<Counted>();
    ConvGeometry g;
    g.pad = {0, 1, 1};
    g.groups = M;
    MulCounter::reset();
    wino::conv2d_depthwise(in, ker, plan, g);
    CHECK(MulCounter::value() == std::uint64_t(M * T * ((H + 1) / 2) * ((W + 1) / 2) * 16));
  }

  // 3D: N*C*ceil(T'/m)*ceil(H'/m)*ceil(W'/m)*n^3
  {
    const std::int64_t C = 2, N = 3, T = 5, H = 4, W = 6;
    const auto in = Tensor5<double>::random({1, C, T, H, W}, 95).cast<Counted>();
    const auto ker = Tensor5<double>::random({N, C, 3, 3, 3}, 96).cast<Counted>();
    ConvGeometry g;
    g.pad = {1, 1, 1};
    MulCounter::reset();
    wino::conv3d(in, ker, plan, g);
    CHECK(MulCounter::value() ==
          std::uint64_t(N * C * ((T + 1) / 2) * ((H + 1) / 2) * ((W + 1) / 2) * 64));
  }
}
