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

#include <vector>

#include "fsbconv/tensor.hpp"

namespace fsbconv {

/// Transform matrices for F(m, r): m correlation outputs of an r-tap filter
/// with m+r-1 multiplications, Y = AT [(G g) (.) (BT d)].
///
/// The matrices are generated by Cook-Toom interpolation at the canonical
/// points 0, 1, -1, 2, -2, 1/2, -1/2, 4 (first m+r-2 of them) plus the point
/// at infinity, carried out in exact rational arithmetic and verified against
/// plain correlation on the complete one-hot basis before the entries are
/// materialized as doubles.
class WinogradPlan {
 public:
  int m() const noexcept { return m_; }
  int r() const noexcept { return r_; }
  int n() const noexcept { return n_; }  // m + r - 1
  std::int64_t mults_per_tile() const noexcept { return n_; }

  // Row-major, in the orientation the kernels apply them.
  const double* at() const noexcept { return at_.data(); }  // m x n
  const double* g() const noexcept { return g_.data(); }    // n x r
  const double* bt() const noexcept { return bt_.data(); }  // n x n

  // Finite interpolation points (the point at infinity is implicit).
  const std::vector<double>& points() const noexcept { return points_; }

 private:
  friend WinogradPlan cook_toom_plan(int m, int r);
  int m_ = 0, r_ = 0, n_ = 0;
  std::vector<double> at_, g_, bt_;
  std::vector<double> points_;
};

/// Builds F(m, r). Requires m >= 1, r >= 2 and m+r-1 <= 8; larger plans are
/// refused because the interpolation points grow numerically hostile.
WinogradPlan cook_toom_plan(int m, int r);

/// F(m1, K) along time nested with F(m2 x m2, R x R) in the spatial plane;
/// the spatial plan assumes square kernels.
struct HybridPlan {
  WinogradPlan temporal;
  WinogradPlan spatial;
};

inline HybridPlan make_hybrid_plan(int m1, int K, int m2, int R) {
  return HybridPlan{cook_toom_plan(m1, K), cook_toom_plan(m2, R)};
}

}  // namespace fsbconv
