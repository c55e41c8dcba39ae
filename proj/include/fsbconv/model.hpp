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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fsbconv/video_blocks.hpp"

namespace fsbconv {

enum class LayerKind { conv3d, fsb, trg, pool, relu };

const char* layer_kind_name(LayerKind k);

struct LayerSpec {
  LayerKind kind = LayerKind::conv3d;
  std::int64_t in = 0;   // input channels
  std::int64_t out = 0;  // output channels
  std::array<std::int64_t, 3> kernel{0, 0, 0};          // K, R, S
  std::optional<std::array<std::int64_t, 3>> pad;       // nullopt = "same"
  std::array<std::int64_t, 3> stride{1, 1, 1};
  std::int64_t groups = 1;
  double alpha = 1.0;
  std::int64_t fsb_m = 0;                 // resolved intermediate width
  std::array<std::int64_t, 2> pool{0, 0}; // window, stride (cubic)

  // "same" resolves to (k-1)/2 per axis.
  std::array<std::int64_t, 3> resolved_pad() const {
    if (pad) return *pad;
    return {(kernel[0] - 1) / 2, (kernel[1] - 1) / 2, (kernel[2] - 1) / 2};
  }
};

struct Shape4 {
  std::int64_t c = 0, t = 0, h = 0, w = 0;
  bool operator==(const Shape4&) const = default;
};

struct ModelSpec {
  std::string name;
  Shape4 input;
  std::vector<LayerSpec> layers;
};

/// Parses a model config (JSON text). Unknown keys, unknown layer kinds,
/// missing required fields and channel mismatches raise ParseError with the
/// layer index and field name.
ModelSpec parse_model_json(const std::string& text, const std::string& source_name);
ModelSpec parse_model_file(const std::filesystem::path& path);

/// Shapes after each layer; result[i] is the output of layers[i]. Raises
/// ShapeError naming the first failing layer.
std::vector<Shape4> propagate_shapes(const ModelSpec& spec);

inline Shape4 output_shape(const ModelSpec& spec) {
  auto shapes = propagate_shapes(spec);
  return shapes.empty() ? spec.input : shapes.back();
}

template <typename T>
struct LayerWeights {
  // conv3d holds one tensor, fsb holds the three stages, the rest hold none.
  std::variant<std::monostate, Tensor5<T>, FsbWeights<T>> w;
};

template <typename T>
std::vector<LayerWeights<T>> make_model_weights(const ModelSpec& spec,
                                                std::uint64_t seed) {
  std::vector<LayerWeights<T>> out;
  out.reserve(spec.layers.size());
  SplitMix64 mix(seed);
  for (const LayerSpec& l : spec.layers) {
    LayerWeights<T> lw;
    switch (l.kind) {
      case LayerKind::conv3d:
        lw.w = Tensor5<T>::random(
            {l.out, l.in / l.groups, l.kernel[0], l.kernel[1], l.kernel[2]},
            mix.next());
        break;
      case LayerKind::fsb:
        lw.w = FsbWeights<T>::random(l.in, l.fsb_m, l.out, l.kernel[0],
                                     l.kernel[1], l.kernel[2], mix.next());
        break;
      default:
        break;
    }
    out.push_back(std::move(lw));
  }
  return out;
}

/// Sequential forward pass with the reference kernels. Reports the first
/// shape inconsistency with its layer index.
template <typename T>
Tensor5<T> model_forward(const ModelSpec& spec,
                         const std::vector<LayerWeights<T>>& weights,
                         const Tensor5<T>& input) {
  if (weights.size() != spec.layers.size())
    throw ShapeError("model_forward: weights do not match the layer list");
  if (input.dim(1) != spec.input.c)
    throw ShapeError("model_forward: input channels do not match the spec");
  Tensor5<T> x = input;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    try {
      switch (l.kind) {
        case LayerKind::conv3d: {
          ConvGeometry g;
          g.pad = l.resolved_pad();
          g.stride = l.stride;
          g.groups = l.groups;
          x = ref::conv3d_direct(x, std::get<Tensor5<T>>(weights[i].w), g);
          break;
        }
        case LayerKind::fsb:
          x = fsb_forward(x, std::get<FsbWeights<T>>(weights[i].w));
          break;
        case LayerKind::trg:
          x = trg_forward(x);
          break;
        case LayerKind::pool:
          x = ref::maxpool3d(x, {l.pool[0], l.pool[0], l.pool[0]},
                             {l.pool[1], l.pool[1], l.pool[1]});
          break;
        case LayerKind::relu:
          x = relu_forward(x);
          break;
      }
    } catch (const Error& e) {
      throw ShapeError("layer " + std::to_string(i) + " (" +
                       layer_kind_name(l.kind) + "): " + e.what());
    }
  }
  return x;
}

}  // namespace fsbconv
