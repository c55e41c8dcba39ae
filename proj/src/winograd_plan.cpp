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

#include "fsbconv/winograd_plan.hpp"

#include <numeric>
#include <stdexcept>

namespace fsbconv {

namespace {

// Exact rationals over long long. Every quantity here is tiny (points are
// small halves and integers, polynomials have degree <= 7), so no big-int.
struct Rat {
  long long num = 0;
  long long den = 1;

  static Rat make(long long n, long long d) {
    if (d == 0) throw std::logic_error("rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const long long g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    return Rat{n, d};
  }

  friend Rat operator+(Rat a, Rat b) {
    return make(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rat operator-(Rat a, Rat b) {
    return make(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rat operator*(Rat a, Rat b) { return make(a.num * b.num, a.den * b.den); }
  friend Rat operator/(Rat a, Rat b) { return make(a.num * b.den, a.den * b.num); }
  friend bool operator==(Rat a, Rat b) { return a.num == b.num && a.den == b.den; }

  bool negative() const { return num < 0; }
  double value() const { return double(num) / double(den); }
};

const Rat kZero{0, 1};
const Rat kOne{1, 1};

// Ascending-power polynomial product.
std::vector<Rat> poly_mul(const std::vector<Rat>& a, const std::vector<Rat>& b) {
  std::vector<Rat> out(a.size() + b.size() - 1, kZero);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] = out[i + j] + a[i] * b[j];
  return out;
}

Rat pow_rat(Rat base, int e) {
  Rat acc = kOne;
  for (int i = 0; i < e; ++i) acc = acc * base;
  return acc;
}

struct RationalPlan {
  int m, r, n;
  std::vector<Rat> a;   // n x m Vandermonde (plus infinity row)
  std::vector<Rat> g;   // n x r
  std::vector<Rat> bt;  // n x n
};

// Exact check of AT [(G e_j) (.) (BT e_l)] against plain correlation of the
// one-hot pair, for every (j, l). One-hots form a complete basis, so passing
// here proves the identity for all operands.
void check_basis(const RationalPlan& p) {
  for (int j = 0; j < p.r; ++j)
    for (int l = 0; l < p.n; ++l) {
      for (int t = 0; t < p.m; ++t) {
        Rat y = kZero;
        for (int i = 0; i < p.n; ++i) {
          // (G e_j)_i * (BT e_l)_i, weighted by A_{i,t}
          y = y + p.a[std::size_t(i * p.m + t)] *
                      (p.g[std::size_t(i * p.r + j)] * p.bt[std::size_t(i * p.n + l)]);
        }
        const Rat want = (t + j == l) ? kOne : kZero;
        if (!(y == want))
          throw std::logic_error("cook_toom_plan: basis identity violated");
      }
    }
}

}  // namespace

WinogradPlan cook_toom_plan(int m, int r) {
  if (m < 1) throw UnsupportedError("cook_toom_plan: m must be >= 1");
  if (r < 2) throw UnsupportedError("cook_toom_plan: r must be >= 2");
  const int n = m + r - 1;
  if (n > 8)
    throw UnsupportedError(
        "cook_toom_plan: m+r-1 > 8 is not supported (interpolation points "
        "become ill-conditioned)");

  static const Rat kPoints[] = {
      {0, 1}, {1, 1}, {-1, 1}, {2, 1}, {-2, 1}, {1, 2}, {-1, 2}, {4, 1},
  };
  const int nf = n - 1;  // finite points; the last row is the point at infinity

  RationalPlan p;
  p.m = m;
  p.r = r;
  p.n = n;
  p.a.assign(std::size_t(n * m), kZero);
  p.g.assign(std::size_t(n * r), kZero);
  p.bt.assign(std::size_t(n * n), kZero);

  // N_i = prod_{k != i} (p_i - p_k); row scales G by 1/N_i and BT by N_i, so
  // the bilinear form is unchanged. The first point's scale is flipped
  // positive when needed, which is what lands F(2,3) on the classic matrices.
  std::vector<Rat> scale_i(std::size_t(nf), kOne);
  for (int i = 0; i < nf; ++i) {
    Rat prod = kOne;
    for (int k = 0; k < nf; ++k)
      if (k != i) prod = prod * (kPoints[i] - kPoints[k]);
    scale_i[std::size_t(i)] = prod;
  }
  if (nf > 0 && scale_i[0].negative())
    scale_i[0] = kZero - scale_i[0];

  for (int i = 0; i < nf; ++i) {
    const Rat pi = kPoints[i];
    for (int j = 0; j < m; ++j) p.a[std::size_t(i * m + j)] = pow_rat(pi, j);
    for (int j = 0; j < r; ++j)
      p.g[std::size_t(i * r + j)] = pow_rat(pi, j) / scale_i[std::size_t(i)];

    // BT row i: coefficients of M_i(x) = prod_{k != i} (x - p_k), scaled by
    // scale_i / N_i (that is, by -1 exactly when the first scale was flipped).
    std::vector<Rat> mi{kOne};
    Rat ni = kOne;
    for (int k = 0; k < nf; ++k)
      if (k != i) {
        mi = poly_mul(mi, {kZero - kPoints[k], kOne});
        ni = ni * (kPoints[i] - kPoints[k]);
      }
    const Rat row_scale = scale_i[std::size_t(i)] / ni;
    for (std::size_t j = 0; j < mi.size(); ++j)
      p.bt[std::size_t(i * n) + j] = mi[j] * row_scale;
  }

  // Point at infinity carries the leading coefficients; the paired -1 on the
  // A and BT rows cancels in the bilinear form.
  p.a[std::size_t((n - 1) * m + (m - 1))] = kZero - kOne;
  p.g[std::size_t((n - 1) * r + (r - 1))] = kOne;
  {
    std::vector<Rat> mfull{kOne};
    for (int k = 0; k < nf; ++k) mfull = poly_mul(mfull, {kZero - kPoints[k], kOne});
    for (std::size_t j = 0; j < mfull.size(); ++j)
      p.bt[std::size_t((n - 1) * n) + j] = kZero - mfull[j];
  }

  check_basis(p);

  WinogradPlan plan;
  plan.m_ = m;
  plan.r_ = r;
  plan.n_ = n;
  plan.at_.assign(std::size_t(m * n), 0.0);
  plan.g_.assign(std::size_t(n * r), 0.0);
  plan.bt_.assign(std::size_t(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      plan.at_[std::size_t(j * n + i)] = p.a[std::size_t(i * m + j)].value();
  for (std::size_t i = 0; i < plan.g_.size(); ++i) plan.g_[i] = p.g[i].value();
  for (std::size_t i = 0; i < plan.bt_.size(); ++i) plan.bt_[i] = p.bt[i].value();
  plan.points_.reserve(std::size_t(nf));
  for (int i = 0; i < nf; ++i) plan.points_.push_back(kPoints[i].value());
  return plan;
}

}  // namespace fsbconv
