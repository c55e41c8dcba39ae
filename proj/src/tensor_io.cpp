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

#include "fsbconv/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace fsbconv {

namespace {

constexpr char kMagic[4] = {'T', '5', 'D', 'F'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

template <typename T>
void write_impl(const Tensor5<T>& t, const std::filesystem::path& path, Dtype code) {
  for (std::int64_t d : t.dims())
    if (d > std::int64_t(0xffffffffu))
      throw SizeError("T5DF extents are limited to 32 bits");

  std::string buf;
  buf.reserve(20 + static_cast<std::size_t>(t.size()) * sizeof(T));
  buf.append(kMagic, 4);
  put_u16(buf, kVersion);
  put_u16(buf, static_cast<std::uint16_t>(code));
  for (std::int64_t d : t.dims()) put_u32(buf, static_cast<std::uint32_t>(d));
  for (std::int64_t i = 0; i < t.size(); ++i) {
    const T v = t.data()[static_cast<std::size_t>(i)];
    if constexpr (sizeof(T) == 4)
      put_u32(buf, std::bit_cast<std::uint32_t>(v));
    else
      put_u64(buf, std::bit_cast<std::uint64_t>(v));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open for writing: " + path.string());
  f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!f) throw Error("short write: " + path.string());
}

struct Reader {
  std::string bytes;
  std::uint64_t pos = 0;

  void need(std::uint64_t n, const char* what) {
    if (pos + n > bytes.size())
      throw FormatError(std::string("truncated T5DF file, expected ") + what, pos);
  }
  std::uint16_t u16() {
    need(2, "u16");
    auto b = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    pos += 2;
    return std::uint16_t(b[0] | (std::uint16_t(b[1]) << 8));
  }
  std::uint32_t u32() {
    need(4, "u32");
    auto b = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    pos += 4;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8, "u64");
    auto b = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    pos += 8;
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
  }
};

template <typename T>
Tensor5<T> read_payload(Reader& r, const Dims5& dims) {
  Tensor5<T> t(dims);
  for (std::int64_t i = 0; i < t.size(); ++i) {
    if constexpr (sizeof(T) == 4)
      t.data()[static_cast<std::size_t>(i)] = std::bit_cast<T>(r.u32());
    else
      t.data()[static_cast<std::size_t>(i)] = std::bit_cast<T>(r.u64());
  }
  if (r.pos != r.bytes.size())
    throw FormatError("trailing bytes after T5DF payload", r.pos);
  return t;
}

}  // namespace

void write_t5df(const Tensor5<float>& t, const std::filesystem::path& path) {
  write_impl(t, path, Dtype::f32);
}

void write_t5df(const Tensor5<double>& t, const std::filesystem::path& path) {
  write_impl(t, path, Dtype::f64);
}

AnyTensor read_t5df(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open for reading: " + path.string());
  Reader r;
  r.bytes.assign(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());

  r.need(4, "magic");
  if (std::memcmp(r.bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad T5DF magic", 0);
  r.pos = 4;

  const std::uint64_t version_at = r.pos;
  const std::uint16_t version = r.u16();
  if (version != kVersion)
    throw FormatError("unsupported T5DF version " + std::to_string(version), version_at);

  const std::uint64_t dtype_at = r.pos;
  const std::uint16_t dtype = r.u16();

  Dims5 dims;
  for (auto& d : dims) d = std::int64_t(r.u32());

  switch (dtype) {
    case std::uint16_t(Dtype::f32):
      return read_payload<float>(r, dims);
    case std::uint16_t(Dtype::f64):
      return read_payload<double>(r, dims);
    default:
      throw FormatError("unknown T5DF dtype code " + std::to_string(dtype), dtype_at);
  }
}

}  // namespace fsbconv
