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

#include <filesystem>
#include <variant>

#include "fsbconv/tensor.hpp"

namespace fsbconv {

enum class Dtype : std::uint16_t { f32 = 1, f64 = 2 };

using AnyTensor = std::variant<Tensor5<float>, Tensor5<double>>;

// T5DF: "T5DF" magic, u16 LE version (=1), u16 LE dtype code (1=f32, 2=f64),
// five u32 LE extents in (batch, channel, time, height, width) order, then
// raw little-endian element payload in flat order. No padding, no footer.
// Round-trips are bit-exact, including NaN payloads.
void write_t5df(const Tensor5<float>& t, const std::filesystem::path& path);
void write_t5df(const Tensor5<double>& t, const std::filesystem::path& path);
AnyTensor read_t5df(const std::filesystem::path& path);

inline Dtype dtype_of(const AnyTensor& t) {
  return std::holds_alternative<Tensor5<float>>(t) ? Dtype::f32 : Dtype::f64;
}

}  // namespace fsbconv
