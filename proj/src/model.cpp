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

#include "fsbconv/model.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

namespace fsbconv {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

std::int64_t require_int(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
  if (!j[key].is_number_integer()) fail(where, std::string("field \"") + key + "\" must be an integer");
  return j[key].get<std::int64_t>();
}

std::array<std::int64_t, 3> require_int3(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) fail(where, std::string("missing field \"") + key + "\"");
  const json& v = j[key];
  if (!v.is_array() || v.size() != 3) fail(where, std::string("field \"") + key + "\" must be a 3-element array");
  std::array<std::int64_t, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!v[std::size_t(i)].is_number_integer()) fail(where, std::string("field \"") + key + "\" must hold integers");
    out[std::size_t(i)] = v[std::size_t(i)].get<std::int64_t>();
  }
  return out;
}

LayerKind parse_kind(const json& j, const std::string& where) {
  if (!j.contains("kind")) fail(where, "missing field \"kind\"");
  const std::string k = j["kind"].get<std::string>();
  if (k == "conv3d") return LayerKind::conv3d;
  if (k == "fsb") return LayerKind::fsb;
  if (k == "trg") return LayerKind::trg;
  if (k == "pool") return LayerKind::pool;
  if (k == "relu") return LayerKind::relu;
  fail(where, "unknown layer kind \"" + k + "\"");
}

const std::set<std::string> kLayerKeys = {"kind", "in",    "out",  "k",   "pad",
                                          "stride", "m",   "alpha", "pool"};

}  // namespace

const char* layer_kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::conv3d: return "conv3d";
    case LayerKind::fsb: return "fsb";
    case LayerKind::trg: return "trg";
    case LayerKind::pool: return "pool";
    case LayerKind::relu: return "relu";
  }
  return "?";
}

ModelSpec parse_model_json(const std::string& text, const std::string& source_name) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source_name + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError(source_name + ": top level must be an object");
  for (auto it = root.begin(); it != root.end(); ++it)
    if (it.key() != "name" && it.key() != "input" && it.key() != "layers")
      throw ParseError(source_name + ": unknown key \"" + it.key() + "\"");

  ModelSpec spec;
  if (!root.contains("name") || !root["name"].is_string())
    throw ParseError(source_name + ": missing string field \"name\"");
  spec.name = root["name"].get<std::string>();

  if (!root.contains("input") || !root["input"].is_array() || root["input"].size() != 4)
    throw ParseError(source_name + ": \"input\" must be [C, T, H, W]");
  spec.input.c = root["input"][0].get<std::int64_t>();
  spec.input.t = root["input"][1].get<std::int64_t>();
  spec.input.h = root["input"][2].get<std::int64_t>();
  spec.input.w = root["input"][3].get<std::int64_t>();
  if (spec.input.c < 1 || spec.input.t < 1 || spec.input.h < 1 || spec.input.w < 1)
    throw ParseError(source_name + ": input extents must be positive");

  if (!root.contains("layers") || !root["layers"].is_array())
    throw ParseError(source_name + ": missing array field \"layers\"");

  std::int64_t channels = spec.input.c;
  std::size_t idx = 0;
  for (const json& jl : root["layers"]) {
    const std::string where = source_name + ": layer " + std::to_string(idx);
    if (!jl.is_object()) fail(where, "must be an object");
    for (auto it = jl.begin(); it != jl.end(); ++it)
      if (!kLayerKeys.count(it.key())) fail(where, "unknown key \"" + it.key() + "\"");

    LayerSpec l;
    l.kind = parse_kind(jl, where);

    switch (l.kind) {
      case LayerKind::conv3d:
      case LayerKind::fsb: {
        l.in = require_int(jl, where, "in");
        l.out = require_int(jl, where, "out");
        l.kernel = require_int3(jl, where, "k");
        if (l.in < 1 || l.out < 1) fail(where, "channel counts must be positive");
        for (std::int64_t k : l.kernel)
          if (k < 1) fail(where, "kernel extents must be positive");
        if (jl.contains("pad")) {
          const json& p = jl["pad"];
          if (p.is_string()) {
            if (p.get<std::string>() != "same") fail(where, "pad must be \"same\" or a 3-element array");
          } else {
            if (!p.is_array() || p.size() != 3) fail(where, "pad must be \"same\" or a 3-element array");
            std::array<std::int64_t, 3> pv{};
            for (int i = 0; i < 3; ++i) pv[std::size_t(i)] = p[std::size_t(i)].get<std::int64_t>();
            l.pad = pv;
          }
        }
        if (jl.contains("stride")) {
          const json& s = jl["stride"];
          if (s.is_number_integer()) {
            const std::int64_t v = s.get<std::int64_t>();
            l.stride = {v, v, v};
          } else if (s.is_array() && s.size() == 3) {
            for (int i = 0; i < 3; ++i) l.stride[std::size_t(i)] = s[std::size_t(i)].get<std::int64_t>();
          } else {
            fail(where, "stride must be an integer or a 3-element array");
          }
          for (std::int64_t v : l.stride)
            if (v < 1) fail(where, "stride must be positive");
        }
        if (l.kind == LayerKind::fsb) {
          if (l.pad) fail(where, "fsb stages are always same-padded; pad must be \"same\"");
          if (l.stride != std::array<std::int64_t, 3>{1, 1, 1})
            fail(where, "fsb stages are stride-1; use a pool layer to downsample");
          if (jl.contains("alpha")) {
            if (!jl["alpha"].is_number()) fail(where, "alpha must be a number");
            l.alpha = jl["alpha"].get<double>();
            if (l.alpha <= 0) fail(where, "alpha must be positive");
          }
          if (jl.contains("m")) {
            l.fsb_m = require_int(jl, where, "m");
            if (l.fsb_m < 1) fail(where, "m must be positive");
          } else {
            l.fsb_m = std::int64_t(std::llround(l.alpha * double(l.in)));
            if (l.fsb_m < 1) fail(where, "alpha * in rounds to zero");
          }
          if (l.kernel[0] % 2 == 0 || l.kernel[1] % 2 == 0 || l.kernel[2] % 2 == 0)
            fail(where, "fsb kernel extents must be odd");
        } else {
          if (jl.contains("m") || jl.contains("alpha"))
            fail(where, "m/alpha only apply to fsb layers");
        }
        if (jl.contains("pool")) fail(where, "pool only applies to pool layers");
        break;
      }
      case LayerKind::pool: {
        if (!jl.contains("pool")) fail(where, "missing field \"pool\"");
        const json& p = jl["pool"];
        if (!p.is_array() || p.size() != 2) fail(where, "pool must be [window, stride]");
        l.pool = {p[0].get<std::int64_t>(), p[1].get<std::int64_t>()};
        if (l.pool[0] < 1 || l.pool[1] < 1) fail(where, "pool window/stride must be positive");
        l.in = l.out = channels;
        if (jl.contains("in")) l.in = require_int(jl, where, "in");
        if (jl.contains("out")) l.out = require_int(jl, where, "out");
        if (l.in != l.out) fail(where, "pool cannot change the channel count");
        break;
      }
      case LayerKind::trg:
      case LayerKind::relu: {
        l.in = l.out = channels;
        if (jl.contains("in")) l.in = require_int(jl, where, "in");
        if (jl.contains("out")) l.out = require_int(jl, where, "out");
        if (l.in != l.out)
          fail(where, std::string(layer_kind_name(l.kind)) + " cannot change the channel count");
        for (const char* key : {"k", "pad", "stride", "m", "alpha", "pool"})
          if (jl.contains(key)) fail(where, std::string("field \"") + key + "\" does not apply");
        break;
      }
    }

    if (l.in != channels)
      fail(where, "input channels " + std::to_string(l.in) +
                      " do not match previous output " + std::to_string(channels));
    channels = l.out;
    spec.layers.push_back(l);
    ++idx;
  }
  return spec;
}

ModelSpec parse_model_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open model config: " + path.string());
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return parse_model_json(text, path.filename().string());
}

std::vector<Shape4> propagate_shapes(const ModelSpec& spec) {
  std::vector<Shape4> out;
  out.reserve(spec.layers.size());
  Shape4 s = spec.input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const std::string where = "layer " + std::to_string(i) + " (" + layer_kind_name(l.kind) + ")";
    try {
      switch (l.kind) {
        case LayerKind::conv3d:
        case LayerKind::fsb: {
          if (l.in != s.c) throw ShapeError("channel mismatch");
          const auto pad = l.resolved_pad();
          const auto stride = l.kind == LayerKind::fsb
                                  ? std::array<std::int64_t, 3>{1, 1, 1}
                                  : l.stride;
          s.c = l.out;
          s.t = conv_out_extent(s.t, l.kernel[0], pad[0], stride[0]);
          s.h = conv_out_extent(s.h, l.kernel[1], pad[1], stride[1]);
          s.w = conv_out_extent(s.w, l.kernel[2], pad[2], stride[2]);
          break;
        }
        case LayerKind::pool:
          s.t = conv_out_extent(s.t, l.pool[0], 0, l.pool[1]);
          s.h = conv_out_extent(s.h, l.pool[0], 0, l.pool[1]);
          s.w = conv_out_extent(s.w, l.pool[0], 0, l.pool[1]);
          break;
        case LayerKind::trg:
          if (s.t < 2) throw ShapeError("temporal extent must be >= 2");
          break;
        case LayerKind::relu:
          break;
      }
      if (s.t < 1 || s.h < 1 || s.w < 1) throw ShapeError("extent shrank to zero");
    } catch (const Error& e) {
      throw ShapeError(where + ": " + e.what());
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace fsbconv
