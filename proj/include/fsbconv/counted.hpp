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

#include <atomic>
#include <cstdint>

namespace fsbconv {

// Global multiplication counter backing the Counted scalar. Atomic so the
// OpenMP kernels produce exact totals under any thread count.
struct MulCounter {
  static std::atomic<std::uint64_t>& counter() {
    static std::atomic<std::uint64_t> c{0};
    return c;
  }
  static void reset() { counter().store(0, std::memory_order_relaxed); }
  static std::uint64_t value() { return counter().load(std::memory_order_relaxed); }
};

/// Drop-in scalar that counts data*data multiplications. Transform-matrix
/// constants and mean weights are applied through scale(), which does not
/// count, so a kernel instantiated with Counted reports exactly its EWMM/MAC
/// multiplications -- the quantity the complexity analyzer models.
struct Counted {
  double v = 0.0;

  Counted() = default;
  Counted(double x) : v(x) {}  // implicit: kernels write T(0), T(1)

  friend Counted operator+(Counted a, Counted b) { return Counted(a.v + b.v); }
  friend Counted operator-(Counted a, Counted b) { return Counted(a.v - b.v); }
  friend Counted operator-(Counted a) { return Counted(-a.v); }
  friend Counted operator*(Counted a, Counted b) {
    MulCounter::counter().fetch_add(1, std::memory_order_relaxed);
    return Counted(a.v * b.v);
  }
  Counted& operator+=(Counted o) {
    v += o.v;
    return *this;
  }
  Counted& operator-=(Counted o) {
    v -= o.v;
    return *this;
  }
  friend bool operator<(Counted a, Counted b) { return a.v < b.v; }
  friend bool operator==(Counted a, Counted b) { return a.v == b.v; }
};

inline double to_double(Counted x) { return x.v; }

// Constant scaling is exempt from the count.
inline Counted scale(double c, Counted x) { return Counted(c * x.v); }

}  // namespace fsbconv
