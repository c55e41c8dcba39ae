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
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsbconv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand extents do not match the operation's contract.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Requested extents overflow the addressable element count.
class SizeError : public Error {
 public:
  using Error::Error;
};

// Malformed T5DF stream; carries the byte offset where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& msg, std::uint64_t offset)
      : Error(msg + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

// Malformed model config.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed request outside the supported envelope (oversized transform
// plan, strided fast path, non-cubic 3D kernel, ...).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Extents in (batch, channel, time, height, width) order, width fastest in
// memory.
using Dims5 = std::array<std::int64_t, 5>;

/// splitmix64. Fixed constants, no platform-dependent state; the stream for a
/// given seed is identical everywhere, which makes golden tensors portable.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [-1, 1). The 53 (resp. 24) high bits convert exactly, so the
  // result is a pure function of next().
  double next_f64() { return 2.0 * (double(next() >> 11) * 0x1.0p-53) - 1.0; }
  float next_f32() { return 2.0f * (float(next() >> 40) * 0x1.0p-24f) - 1.0f; }

  // Uniform integer in [lo, hi]. Small ranges only (modulo bias is irrelevant
  // for shape sampling).
  std::int64_t range(std::int64_t lo, std::int64_t hi) {
    return lo + std::int64_t(next() % std::uint64_t(hi - lo + 1));
  }

 private:
  std::uint64_t state_;
};

inline double to_double(float x) { return x; }
inline double to_double(double x) { return x; }

// Constant scaling, e.g. applying a transform-matrix entry or a 1/T mean
// weight. Kept distinct from operator* so the instrumented scalar can exempt
// it from the multiplication count.
inline float scale(double c, float x) { return static_cast<float>(c) * x; }
inline double scale(double c, double x) { return c * x; }

namespace detail {

template <typename T>
struct RandomDraw;

template <>
struct RandomDraw<float> {
  static float draw(SplitMix64& g) { return g.next_f32(); }
};

template <>
struct RandomDraw<double> {
  static double draw(SplitMix64& g) { return g.next_f64(); }
};

}  // namespace detail

/// Dense 5-axis tensor, (batch, channel, time, height, width), row-major with
/// width fastest. Flat offset of (b, c, t, y, x) is
/// ((((b*C + c)*T + t)*H + y)*W + x. Immutable once filled in all library
/// paths, so concurrent reads are safe.
template <typename T>
class Tensor5 {
 public:
  Tensor5() : dims_{0, 0, 0, 0, 0} {}

  explicit Tensor5(const Dims5& dims, T fill = T(0))
      : dims_(dims), data_(static_cast<std::size_t>(checked_size(dims)), fill) {}

  /// Elements uniform in [-1, 1), drawn in flat order from SplitMix64(seed).
  static Tensor5 random(const Dims5& dims, std::uint64_t seed) {
    Tensor5 t(dims);
    SplitMix64 gen(seed);
    for (auto& v : t.data_) v = detail::RandomDraw<T>::draw(gen);
    return t;
  }

  const Dims5& dims() const noexcept { return dims_; }
  std::int64_t dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool same_dims(const Tensor5& o) const { return dims_ == o.dims_; }

  std::int64_t offset(std::int64_t b, std::int64_t c, std::int64_t t,
                      std::int64_t y, std::int64_t x) const {
    return (((b * dims_[1] + c) * dims_[2] + t) * dims_[3] + y) * dims_[4] + x;
  }

  T& at(std::int64_t b, std::int64_t c, std::int64_t t, std::int64_t y,
        std::int64_t x) {
    return data_[static_cast<std::size_t>(offset(b, c, t, y, x))];
  }
  const T& at(std::int64_t b, std::int64_t c, std::int64_t t, std::int64_t y,
              std::int64_t x) const {
    return data_[static_cast<std::size_t>(offset(b, c, t, y, x))];
  }

  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  template <typename U>
  Tensor5<U> cast() const {
    Tensor5<U> out(dims_);
    for (std::int64_t i = 0; i < size(); ++i)
      out.data()[static_cast<std::size_t>(i)] =
          U(to_double(data_[static_cast<std::size_t>(i)]));
    return out;
  }

 private:
  static std::int64_t checked_size(const Dims5& dims) {
    std::int64_t n = 1;
    for (std::int64_t d : dims) {
      if (d < 0) throw SizeError("negative tensor extent");
      if (d != 0 && n > std::numeric_limits<std::int64_t>::max() / d)
        throw SizeError("tensor extent product overflows addressable size");
      n *= d;
    }
    // vector<T> can't address more than size_t elements either
    if (static_cast<std::uint64_t>(n) >
        std::numeric_limits<std::size_t>::max() / sizeof(T))
      throw SizeError("tensor extent product overflows addressable size");
    return n;
  }

  Dims5 dims_;
  std::vector<T> data_;
};

struct CloseReport {
  bool ok = true;
  double max_abs_err = 0.0;  // |a_i - b_i| at the worst element
  std::int64_t argmax_flat = -1;
  Dims5 argmax{0, 0, 0, 0, 0};
  double lhs = 0.0;
  double rhs = 0.0;
};

/// True iff |a_i - b_i| <= abs_tol + rel_tol * max(|a_i|, |b_i|) for every i.
/// The report carries the argmax of |a_i - b_i| regardless of outcome.
template <typename T>
CloseReport allclose(const Tensor5<T>& a, const Tensor5<T>& b, double rel_tol,
                     double abs_tol) {
  if (!a.same_dims(b)) throw ShapeError("allclose: dimension mismatch");
  CloseReport rep;
  const std::int64_t n = a.size();
  for (std::int64_t i = 0; i < n; ++i) {
    const double av = to_double(a.data()[static_cast<std::size_t>(i)]);
    const double bv = to_double(b.data()[static_cast<std::size_t>(i)]);
    const double err = std::abs(av - bv);
    if (err > abs_tol + rel_tol * std::max(std::abs(av), std::abs(bv)))
      rep.ok = false;
    if (err > rep.max_abs_err || rep.argmax_flat < 0) {
      rep.max_abs_err = err;
      rep.argmax_flat = i;
      rep.lhs = av;
      rep.rhs = bv;
    }
  }
  if (rep.argmax_flat >= 0) {
    std::int64_t rem = rep.argmax_flat;
    const Dims5& d = a.dims();
    for (int axis = 4; axis >= 1; --axis) {
      rep.argmax[static_cast<std::size_t>(axis)] = rem % d[static_cast<std::size_t>(axis)];
      rem /= d[static_cast<std::size_t>(axis)];
    }
    rep.argmax[0] = rem;
  }
  return rep;
}

/// Max elementwise error normalized by the larger sup norm of the operands.
/// This is the figure reported by the verification suites.
template <typename T>
double max_rel_error(const Tensor5<T>& a, const Tensor5<T>& b) {
  if (!a.same_dims(b)) throw ShapeError("max_rel_error: dimension mismatch");
  double max_err = 0.0, norm = 0.0;
  const std::int64_t n = a.size();
  for (std::int64_t i = 0; i < n; ++i) {
    const double av = to_double(a.data()[static_cast<std::size_t>(i)]);
    const double bv = to_double(b.data()[static_cast<std::size_t>(i)]);
    max_err = std::max(max_err, std::abs(av - bv));
    norm = std::max({norm, std::abs(av), std::abs(bv)});
  }
  if (norm == 0.0) return 0.0;
  return max_err / norm;
}

}  // namespace fsbconv
